#include "veridoc/ocr.hpp"

#include <array>
#include <algorithm>
#include <atomic>
#include <bitset>
#include <limits>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <unistd.h>

#include "veridoc/imgproc.hpp"
#include "veridoc/png_io.hpp"

namespace veridoc {

namespace {

constexpr int kCw = GlyphAtlas::kCellWidth;
constexpr int kCh = GlyphAtlas::kCellHeight;
constexpr int kCellBits = kCw * kCh;
constexpr int kBandTop = 2;   // first glyph row inside a cell
constexpr int kBandRows = 7;  // glyph rows per cell
constexpr int kMinInk = 3;
constexpr int kVerticalSlack = 3;

using CellBits = std::bitset<kCellBits>;
using InkMask = Plane<std::uint8_t>;  // 1 = ink

struct GlyphBits {
    char ch;
    CellBits bits;
    std::int64_t ink;
};

CellBits cell_at(const InkMask& m, int left, int top) {
    CellBits b;
    for (int r = 0; r < kCh; ++r) {
        const int y = top + r;
        if (y < 0 || y >= m.rows()) continue;
        for (int c = 0; c < kCw; ++c) {
            const int x = left + c;
            if (x >= 0 && x < m.cols() && m(y, x)) b.set(r * kCw + c);
        }
    }
    return b;
}

/// Hamming distance to the closest atlas cell, blank included.
std::size_t cell_cost(const CellBits& cell, const std::vector<GlyphBits>& glyphs) {
    std::size_t best = cell.count();
    for (const auto& g : glyphs) best = std::min(best, (cell ^ g.bits).count());
    return best;
}

struct Reading {
    char ch = ' ';
    double score = 0;
    bool blank = true;
};

Reading classify(const CellBits& cell, const std::vector<GlyphBits>& glyphs) {
    const std::size_t blank_cost = cell.count();
    std::size_t glyph_cost = kCellBits + 1;
    for (const auto& g : glyphs) glyph_cost = std::min(glyph_cost, (cell ^ g.bits).count());
    if (blank_cost <= glyph_cost) return {};

    const auto ss = static_cast<std::int64_t>(blank_cost);
    Reading best{'?', -1.0, false};
    if (ss == kCellBits) return best;
    for (const auto& g : glyphs) {
        // Binary pixels: Σs² = Σs.
        const auto sts = static_cast<std::int64_t>((cell & g.bits).count());
        const double score = detail::zncc_from_sums(kCellBits, g.ink, ss, g.ink, ss, sts);
        if (score > best.score) best = {g.ch, score, false};
    }
    return best;
}

OcrSegment read_region(const std::vector<GlyphBits>& glyphs, const GrayImage& image, const TextRegion& region,
                       const FixtureOcrOptions& opts) {
    OcrSegment seg{region, "", 1.0};
    const Rect box = region.box.intersect({0, 0, image.width(), image.height()});
    if (box.empty()) return seg;

    const auto binary = adaptive_threshold(crop(image, box), opts.block_size, opts.threshold_offset);
    const InkMask ink = (binary.plane().array() == BinaryImage::kBackground).cast<std::uint8_t>();
    const int w = box.w, h = box.h;

    // Text line: the 7-row glyph band holding the most ink.
    const Eigen::VectorXi rows = ink.cast<int>().rowwise().sum();
    int band_top = 0, band_ink = -1;
    for (int top = -kBandRows + 1; top < h; ++top) {
        int s = 0;
        for (int r = std::max(0, top); r < std::min(h, top + kBandRows); ++r) s += rows(r);
        if (s > band_ink) band_ink = s, band_top = top;
    }
    if (band_ink < kMinInk) return seg;

    // Fixed pitch: fit the cell grid (horizontal phase, vertical offset) that explains
    // the ink with the fewest wrong pixels.
    const int nominal_top = band_top - kBandTop;
    int best_top = nominal_top, best_phase = 0;
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    for (int top = nominal_top - kVerticalSlack; top <= nominal_top + kVerticalSlack; ++top)
        for (int phase = 0; phase < kCw; ++phase) {
            std::size_t cost = 0;
            for (int left = phase - kCw; left < w && cost < best_cost; left += kCw)
                cost += cell_cost(cell_at(ink, left, top), glyphs);
            if (cost < best_cost) best_cost = cost, best_top = top, best_phase = phase;
        }

    std::vector<Reading> readings;
    for (int left = best_phase - kCw; left < w; left += kCw)
        readings.push_back(classify(cell_at(ink, left, best_top), glyphs));
    auto first = std::find_if(readings.begin(), readings.end(), [](const Reading& r) { return !r.blank; });
    auto last = std::find_if(readings.rbegin(), readings.rend(), [](const Reading& r) { return !r.blank; }).base();
    if (first >= last) return seg;

    double total = 0;
    int glyph_count = 0;
    for (auto it = first; it != last; ++it) {
        if (it->blank) {
            seg.text.push_back(' ');
            continue;
        }
        ++glyph_count;
        if (it->score < opts.min_glyph_score) {
            seg.text.push_back('?');
        } else {
            seg.text.push_back(it->ch);
            total += (it->score + 1.0) / 2.0;
        }
    }
    seg.confidence = total / glyph_count;
    return seg;
}

}  // namespace

std::vector<OcrSegment> fixture_extract(const GlyphAtlas& atlas, const GrayImage& image,
                                        std::span<const TextRegion> regions, const FixtureOcrOptions& opts) {
    std::vector<GlyphBits> glyphs;
    for (char ch : atlas.alphabet()) {
        if (ch == ' ') continue;
        const auto& cell = atlas.glyph(ch);
        CellBits bits;
        for (int i = 0; i < kCellBits; ++i) bits[i] = cell.data()[i] != 0;
        glyphs.push_back({ch, bits, static_cast<std::int64_t>(bits.count())});
    }
    std::vector<OcrSegment> out;
    out.reserve(regions.size());
    for (const auto& r : regions) out.push_back(read_region(glyphs, image, r, opts));
    return out;
}

std::vector<OcrSegment> parse_external_output(std::string_view output, const TextRegion& region) {
    std::vector<OcrSegment> out;
    std::istringstream lines{std::string(output)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        Rect b;
        double conf = 0;
        if (!(fields >> b.x >> b.y >> b.w >> b.h >> conf)) throw ParseError("malformed OCR adapter line", lineno);
        if (!(conf >= 0.0 && conf <= 1.0)) throw ParseError("OCR confidence outside [0,1]", lineno);
        std::string text;
        std::getline(fields, text);
        const auto first = text.find_first_not_of(" \t");
        text = first == std::string::npos ? "" : text.substr(first);
        while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.pop_back();

        const Rect shifted = Rect{b.x + region.box.x, b.y + region.box.y, b.w, b.h}.intersect(region.box);
        out.push_back({{region.field_name, shifted}, text, conf});
    }
    return out;
}

std::vector<OcrSegment> ExternalOcrEngine::extract(const GrayImage& image, std::span<const TextRegion> regions) {
    static std::atomic<unsigned> counter{0};
    std::vector<OcrSegment> out;
    for (const auto& region : regions) {
        const Rect box = region.box.intersect({0, 0, image.width(), image.height()});
        if (box.empty()) continue;
        const auto path = std::filesystem::temp_directory_path() /
                          ("veridoc-ocr-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".png");
        write_png(path, crop(image, box));

        std::string result;
        const std::string cmd = command_ + " '" + path.string() + "'";
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (!pipe) {
            std::filesystem::remove(path);
            throw IoError("cannot launch OCR adapter: " + command_);
        }
        std::array<char, 4096> buf;
        std::size_t got;
        while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.append(buf.data(), got);
        const int status = ::pclose(pipe);
        std::filesystem::remove(path);
        if (status != 0) throw IoError("OCR adapter failed (status " + std::to_string(status) + "): " + command_);

        auto segs = parse_external_output(result, {region.field_name, box});
        std::move(segs.begin(), segs.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<TextRegion> localize_text_regions(const GrayImage& sample, const TemplateRecord& templ,
                                              const MatchResult& match) {
    if (!match.matched) throw ParameterError("text localization requires a matched template");
    const Rect bounds{0, 0, sample.width(), sample.height()};
    if (templ.text_regions.empty()) return {{"page", bounds}};

    const double sx = static_cast<double>(sample.width()) / templ.width();
    const double sy = static_cast<double>(sample.height()) / templ.height();
    std::vector<TextRegion> out;
    for (const auto& fr : templ.text_regions) {
        const Rect mapped{static_cast<int>(std::lround(fr.box.x * sx)) + match.offset.x,
                          static_cast<int>(std::lround(fr.box.y * sy)) + match.offset.y,
                          static_cast<int>(std::lround(fr.box.w * sx)),
                          static_cast<int>(std::lround(fr.box.h * sy))};
        const Rect clipped = mapped.intersect(bounds);
        if (!clipped.empty()) out.push_back({fr.field, clipped});
    }
    return out;
}

std::string normalize_text(std::span<const OcrSegment> segments) {
    std::string out;
    bool pending_space = false;
    for (const auto& seg : segments) {
        pending_space = !out.empty();
        for (unsigned char ch : seg.text) {
            if (std::isspace(ch)) {
                pending_space = !out.empty();
                continue;
            }
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(ch)));
        }
    }
    return out;
}

double mean_confidence(std::span<const OcrSegment> segments) {
    if (segments.empty()) return 1.0;
    double total = 0;
    for (const auto& s : segments) total += s.confidence;
    return total / static_cast<double>(segments.size());
}

}  // namespace veridoc
