// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "oracles.hpp"
#include "synth.hpp"
#include "veridoc/fraud.hpp"
#include "veridoc/imgproc.hpp"
#include "veridoc/matching.hpp"
#include "veridoc/ocr.hpp"
#include "veridoc/png_io.hpp"
#include "veridoc/ssim.hpp"

using namespace veridoc;
namespace fs = std::filesystem;
namespace synth = veridoc::testing;

namespace {

/// Keeps the first few failure messages of a criterion.
struct Check {
    std::vector<std::string> failures;
    std::size_t count = 0;
    std::size_t failed = 0;

    void expect(bool ok, const std::string& what) {
        ++count;
        if (ok) return;
        if (++failed <= 5) failures.push_back(what);
    }
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

GrayImage map(const GrayImage& img, const std::function<int(int)>& f) {
    Plane<std::uint8_t> p(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) p(y, x) = static_cast<std::uint8_t>(f(img(x, y)));
    return GrayImage(std::move(p));
}

bool constant(const GrayImage& g) { return g.plane().minCoeff() == g.plane().maxCoeff(); }

void ssim_correctness(Check& c) {
    std::mt19937 rng(101);
    for (int i = 0; i < 1000; ++i) {
        const int w = 2 + rng() % 40, h = 2 + rng() % 40;
        const auto a = oracle::random_gray(rng, w, h), b = oracle::random_gray(rng, w, h);
        const double ab = ssim_global(a, b), ba = ssim_global(b, a);
        c.expect(std::abs(ssim_global(a, a) - 1.0) <= 1e-12, "self " + std::to_string(i));
        c.expect(std::abs(ab - ba) <= 1e-12, "symmetry " + std::to_string(i));
        c.expect(ab >= -1.0 && ab <= 1.0, "bounds " + num(ab));
    }
    for (int i = 0; i < 200; ++i) {
        const int w = 2 + rng() % 15, h = 2 + rng() % 15;
        const int lo = rng() % 128, hi = lo + rng() % (256 - lo);
        const auto a = oracle::random_gray(rng, w, h, lo, hi), b = oracle::random_gray(rng, w, h);
        const double mine = ssim_global(a, b), ref = oracle::ssim(a, b);
        c.expect(std::abs(mine - ref) <= 1e-9, "oracle " + num(mine) + " vs " + num(ref));
    }
}

void zncc_correctness(Check& c) {
    std::mt19937 rng(202);
    for (int i = 0; i < 300; ++i) {
        const auto t = oracle::random_gray(rng, 1 + rng() % 30, 2 + rng() % 30);
        if (constant(t)) continue;
        c.expect(std::abs(zncc_score(t, t) - 1.0) <= 1e-9, "self");
        c.expect(std::abs(zncc_score(t, map(t, [](int v) { return 255 - v; })) + 1.0) <= 1e-9, "negation");
        const auto s = oracle::random_gray(rng, t.width(), t.height());
        if (constant(s)) continue;
        const int a = 1 + rng() % 3, b = rng() % 40;
        const auto affine = map(map(t, [](int v) { return v / 4; }), [&](int v) { return a * v + b; });
        const auto base = map(t, [](int v) { return v / 4; });
        if (constant(base)) continue;
        c.expect(std::abs(zncc_score(affine, s) - zncc_score(base, s)) < 1e-6, "affine");
        c.expect(std::abs(zncc_score(s, affine) - zncc_score(s, base)) < 1e-6, "affine sample");
    }
    for (int i = 0; i < 100; ++i) {
        const int sw = 2 + rng() % 23, sh = 2 + rng() % 23;
        const int tw = 1 + rng() % sw, th = 1 + rng() % sh;
        const auto patch = oracle::random_gray(rng, tw, th);
        if (constant(patch)) continue;
        const auto scene = oracle::random_gray(rng, sw, sh, 0, (i % 3) ? 255 : 3);
        const auto m = sliding_match(patch, scene);
        const auto o = oracle::sliding(patch, scene);
        c.expect(m.offset.x == o.x && m.offset.y == o.y, "sliding argmax scene " + std::to_string(i));
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

struct Run {
    int code;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string("'") + VERIDOC_CLI + "' " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = ::pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void verdict_table(Check& c) {
    const auto dir = synth::scratch_dir("acceptance-corpus");
    const auto corpus = synth::write_corpus(dir);
    const std::string common = " --templates '" + corpus.manifest.string() + "' --dataset '" + corpus.dataset.string() +
                               "' --match-threshold 0.6 --ssim-threshold 0.8";
    const struct {
        fs::path sample;
        const char* golden;
        int code;
        const char* display;
    } rows[] = {
        {corpus.real, "real.txt", 0, "REAL DOCUMENT"},
        {corpus.tampered, "tampered.txt", 2, "Potential Fraud"},
        {corpus.wrong_name, "wrong_name.txt", 3, "Error in data: Potential Fraud"},
        {corpus.unrelated, "unrelated.txt", 4, "No Template Match"},
    };
    for (const auto& row : rows) {
        const auto report = dir / (row.sample.stem().string() + ".json");
        const auto r = run_cli("verify '" + row.sample.string() + "'" + common + " --report '" + report.string() + "'");
        const std::string name = row.sample.filename().string();
        c.expect(r.code == row.code, name + " exit " + std::to_string(r.code));
        c.expect(r.out.ends_with(std::string(row.display) + "\n"), name + " display");
        c.expect(r.out == slurp(fs::path(VERIDOC_GOLDEN_DIR) / row.golden), name + " stdout differs from golden");
        if (row.code == 2) {
            const auto j = nlohmann::json::parse(slurp(report));
            c.expect(j["evidence"]["boxes"].size() >= 2, name + " evidence boxes");
        }
    }
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void ocr_roundtrip(Check& c) {
    const auto& atlas = GlyphAtlas::standard();
    std::mt19937 rng(303);
    std::size_t chars = 0, errors = 0;
    for (int i = 0; i < 50; ++i) {
        const auto text = synth::random_text(rng, atlas.alphabet(), 1, 24);
        const auto img = atlas.render(text, 2 + rng() % 4);
        const std::vector<TextRegion> whole{{"page", {0, 0, img.width(), img.height()}}};
        const auto seg = fixture_extract(atlas, img, whole).at(0);
        c.expect(seg.text == text, "read '" + seg.text + "' for '" + text + "'");
        c.expect(seg.confidence >= 0.99, "confidence " + num(seg.confidence));

        synth::Canvas noisy = img.plane();
        synth::flip_pixels(noisy, 0.02, 5000 + i);
        const auto nseg = fixture_extract(atlas, GrayImage(noisy), whole).at(0);
        chars += text.size();
        errors += std::min(edit_distance(nseg.text, text), text.size());
    }
    const double accuracy = 1.0 - static_cast<double>(errors) / chars;
    c.expect(accuracy >= 0.95, "noisy accuracy " + num(accuracy));
}

void dataset_logic(Check& c) {
    const auto ds = parse_dataset(synth::dataset_csv());
    const std::vector<std::vector<std::string>> hospital_rows{
        {"JOY", "570", "KURNOOL", "01-07-2022", "03-07-2022"},     {"JOEL", "571", "GUNTUR", "02-07-2022", "04-07-2022"},
        {"SMITH", "572", "KRISHNA", "03-07-2022", "05-07-2022"},   {"JORDEN", "573", "GODAVARI", "04-07-2022", "06-07-2022"},
        {"WILLIAM", "574", "SARASWATHI", "05-07-2022", "07-07-2022"}, {"STONE", "575", "VIZAG", "06-07-2022", "08-07-2022"},
        {"TONY", "576", "KODUMUR", "07-07-2022", "09-07-2022"},    {"MARK", "577", "NR.PETA", "08-07-2022", "10-07-2022"},
    };
    c.expect(ds.row_count() == 9, "row count");
    for (std::size_t i = 0; i < hospital_rows.size() && i < ds.row_count(); ++i)
        c.expect(ds.rows()[i] == hospital_rows[i], "row " + std::to_string(i));

    const std::vector<std::string> req{"Name", "IP.No", "Address"};
    const auto john = check_attributes("name: john doe ip no: 372758 address: hyderabad", ds, req);
    c.expect(john.passed && john.matched_row == std::optional<std::size_t>(8), "john doe row match");
    const std::string mixed = "name: joy ip no: 372758 address: guntur";
    c.expect(!check_attributes(mixed, ds, req, MatchMode::row).passed, "mixed rows pass in row mode");
    c.expect(check_attributes(mixed, ds, req, MatchMode::any).passed, "mixed rows fail in any mode");

    const PipelineConfig cfg;
    const double eps = 1e-9;
    int cases = 0;
    for (int s = -1; s <= 1; ++s)
        for (int m = -1; m <= 1; ++m)
            for (int k = -1; k <= 1; ++k) {
                Verdict expected = Verdict::RealDocument;
                if (s < 0) expected = Verdict::NoTemplateMatch;
                else if (m < 0) expected = Verdict::PotentialFraudStructural;
                else if (k < 0) expected = Verdict::PotentialFraudData;
                const auto got = decide_verdict(cfg.match_threshold + s * eps, cfg.ssim_threshold + m * eps, true,
                                                cfg.confidence_threshold + k * eps, cfg);
                c.expect(got == expected, "grid case " + std::to_string(cases));
                ++cases;
            }
    c.expect(cases == 27, "grid size");
}

BinaryImage random_binary(std::mt19937& rng, int w, int h, int percent) {
    Plane<std::uint8_t> p(h, w);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = (rng() % 100 < static_cast<unsigned>(percent)) ? 255 : 0;
    return BinaryImage(std::move(p));
}

void imgproc_oracles(Check& c) {
    std::mt19937 rng(404);
    for (int i = 0; i < 100; ++i) {
        const auto img = random_binary(rng, 1 + rng() % 32, 1 + rng() % 32, 5 + rng() % 80);
        const auto lab = oracle::label_components(img.plane());
        c.expect(static_cast<int>(find_contours(img).size()) == lab.count, "contour count " + std::to_string(i));
    }
    const StructuringElement ses[] = {StructuringElement::rectangle(3, 3), StructuringElement::rectangle(5, 3),
                                      StructuringElement::rectangle(1, 7), StructuringElement::cross(5)};
    for (int i = 0; i < 50; ++i) {
        const auto img = random_binary(rng, 1 + rng() % 32, 1 + rng() % 32, 10 + rng() % 80);
        for (const auto& se : ses) {
            c.expect(morphology(img, MorphOp::dilate, se) == invert(morphology(invert(img), MorphOp::erode, se)),
                     "dilate duality");
            c.expect(morphology(img, MorphOp::erode, se) == invert(morphology(invert(img), MorphOp::dilate, se)),
                     "erode duality");
        }
    }
    for (int size : {1, 3, 5, 7, 9, 11})
        for (double sigma : {0.3, 1.0, 2.5})
            for (int v : {0, 1, 17, 128, 254, 255}) {
                const GrayImage flat(1 + rng() % 20, 1 + rng() % 20, static_cast<std::uint8_t>(v));
                c.expect(gaussian_blur(flat, sigma, size) == flat, "blur constant " + std::to_string(v));
            }
}

void performance(Check& c) {
    const auto corpus = synth::write_corpus(synth::scratch_dir("acceptance-perf"), 1000, 700, 2);
    const auto manifest = load_manifest(corpus.manifest);
    const auto dataset = load_dataset(corpus.dataset);
    const auto sample = read_png_rgb(corpus.real);
    c.expect(manifest.templates.size() == 5, "template count " + std::to_string(manifest.templates.size()));
    FixtureOcrEngine engine;
    const auto start = std::chrono::steady_clock::now();
    const auto report = verify(sample, manifest, dataset, engine, {});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < 2.0, "verify took " + num(secs) + " s");
    c.expect(report.verdict == Verdict::RealDocument, "verdict " + std::string(verdict_name(report.verdict)));
}

}  // namespace

int main() {
    const struct {
        const char* name;
        void (*body)(Check&);
        double budget;
    } criteria[] = {
        {"SSIM correctness", ssim_correctness, 10},
        {"ZNCC correctness", zncc_correctness, 30},
        {"Verdict table reproduction", verdict_table, 20},
        {"OCR fixture roundtrip", ocr_roundtrip, 20},
        {"Dataset logic", dataset_logic, 0},
        {"imgproc oracles", imgproc_oracles, 0},
        {"Performance sanity", performance, 0},
    };
    int failed = 0;
    for (const auto& crit : criteria) {
        Check c;
        const auto start = std::chrono::steady_clock::now();
        try {
            crit.body(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (crit.budget > 0 && secs >= crit.budget) c.failures.push_back("runtime " + num(secs) + " s");
        const bool ok = c.failures.empty();
        failed += !ok;
        std::printf("%s  %s  (%zu checks, %.2f s)\n", ok ? "PASS" : "FAIL", crit.name, c.count, secs);
        for (const auto& f : c.failures) std::printf("      %s\n", f.c_str());
        if (c.failed > 5) std::printf("      ... %zu failed checks in total\n", c.failed);
    }
    return failed ? 1 : 0;
}
