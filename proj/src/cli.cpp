#include "veridoc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "veridoc/format.hpp"
#include "veridoc/fraud.hpp"
#include "veridoc/imgproc.hpp"
#include "veridoc/png_io.hpp"

namespace veridoc::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string templates;
    std::string dataset;
    std::string config;
    std::string ocr = "fixture";
    std::string evidence_dir;
    std::string match_mode;
    bool adaptive = false;
    std::optional<double> match_threshold;
    std::optional<double> ssim_threshold;
    std::optional<double> confidence_threshold;
};

void add_config_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "pipeline config file (falls back to $VERIDOC_CONFIG)");
    cmd->add_flag("--adaptive", o.adaptive, "tune preprocessing parameters to the sample resolution");
    cmd->add_option("--match-threshold", o.match_threshold, "minimum template matching score");
    cmd->add_option("--ssim-threshold", o.ssim_threshold, "SSIM below this flags structural fraud");
    cmd->add_option("--confidence-threshold", o.confidence_threshold, "minimum cumulative confidence");
}

void add_verify_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--templates", o.templates, "template manifest")->required();
    cmd->add_option("--dataset", o.dataset, "reference dataset (CSV)")->required();
    cmd->add_option("--ocr", o.ocr, "OCR engine: fixture | external:<command>");
    cmd->add_option("--evidence", o.evidence_dir, "directory for difference/overlay PNGs");
    cmd->add_option("--match-mode", o.match_mode, "attribute matching: row | any")
        ->check(CLI::IsMember({"row", "any"}));
    add_config_flags(cmd, o);
}

PipelineConfig resolve_config(const CommonOptions& o) {
    PipelineConfig cfg;
    std::string path = o.config;
    if (path.empty())
        if (const char* env = std::getenv("VERIDOC_CONFIG"); env && *env) path = env;
    if (!path.empty()) cfg = load_config(path);
    if (o.adaptive) cfg.adaptive_parameters = true;
    if (o.match_threshold) cfg.match_threshold = *o.match_threshold;
    if (o.ssim_threshold) cfg.ssim_threshold = *o.ssim_threshold;
    if (o.confidence_threshold) cfg.confidence_threshold = *o.confidence_threshold;
    if (o.match_mode == "row") cfg.match_mode = MatchMode::row;
    if (o.match_mode == "any") cfg.match_mode = MatchMode::any;
    cfg.validate();
    return cfg;
}

std::unique_ptr<OcrEngine> make_engine(const std::string& spec) {
    if (spec == "fixture") return std::make_unique<FixtureOcrEngine>();
    constexpr std::string_view prefix = "external:";
    if (spec.starts_with(prefix) && spec.size() > prefix.size())
        return std::make_unique<ExternalOcrEngine>(spec.substr(prefix.size()));
    throw ParameterError("--ocr must be \"fixture\" or \"external:<command>\"");
}

void print_verdict_lines(std::ostream& out, const VerificationReport& r, const PipelineConfig& cfg) {
    out << "Best Template: " << r.best.image_file << ", Matching Score: " << format_score(r.best.score) << '\n';
    if (r.best.matched) {
        out << "Match Found\n";
        out << "Type of document:" << r.doc_type_label << '\n';
        out << format_score(*r.ssim) << '\n';
    }
    out << verdict_display(r.verdict, cfg) << '\n';
}

/// Writes diff/overlay PNGs for a report carrying evidence; returns the diff path.
std::string write_evidence(const fs::path& dir, const std::string& stem, const RasterImage& sample,
                           const TemplateManifest& manifest, const VerificationReport& r) {
    if (!r.evidence) return {};
    fs::create_directories(dir);
    const auto& rec = *manifest.find(r.best.template_id);
    const auto diff = dir / (stem + "_diff.png");
    write_png(diff, r.evidence->diff_image);
    const auto aligned = resize_bilinear(sample, rec.width(), rec.height());
    write_png(dir / (stem + "_overlay.png"), draw_boxes(aligned, r.evidence->boxes));
    return diff.string();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

int cmd_verify(const std::string& sample_path, const CommonOptions& o, const std::string& report_path,
               std::ostream& out) {
    const auto cfg = resolve_config(o);
    const auto manifest = load_manifest(o.templates);
    const auto dataset = load_dataset(o.dataset);
    auto engine = make_engine(o.ocr);
    const auto sample = read_png_rgb(sample_path);

    const auto report = verify(sample, manifest, dataset, *engine, cfg);
    const std::string stem = fs::path(sample_path).stem().string();
    std::string diff;
    if (!o.evidence_dir.empty()) diff = write_evidence(o.evidence_dir, stem, sample, manifest, report);
    if (!report_path.empty())
        write_json(report_path, report_to_json(report, cfg, fs::path(sample_path).filename().string(), diff));

    print_verdict_lines(out, report, cfg);
    return verdict_exit_code(report.verdict);
}

int cmd_batch(const std::string& dir, const CommonOptions& o, std::string reports_dir, int jobs, std::ostream& out) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    const auto cfg = resolve_config(o);
    const auto manifest = load_manifest(o.templates);
    const auto dataset = load_dataset(o.dataset);
    make_engine(o.ocr);  // reject a bad engine spec before fanning out
    if (reports_dir.empty()) reports_dir = (fs::path(dir) / "reports").string();

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    struct Outcome {
        std::optional<Verdict> verdict;
        std::string error;
    };
    std::vector<Outcome> outcomes(files.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        auto engine = make_engine(o.ocr);
        for (std::size_t i = next++; i < files.size(); i = next++) {
            try {
                const auto sample = read_png_rgb(files[i]);
                const auto report = verify(sample, manifest, dataset, *engine, cfg);
                const std::string stem = files[i].stem().string();
                std::string diff;
                if (!o.evidence_dir.empty()) diff = write_evidence(o.evidence_dir, stem, sample, manifest, report);
                write_json(fs::path(reports_dir) / (stem + ".json"),
                           report_to_json(report, cfg, files[i].filename().string(), diff));
                outcomes[i].verdict = report.verdict;
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };

    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(files.size(), 1))));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::size_t real = 0, structural = 0, data = 0, nomatch = 0, errors = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto& oc = outcomes[i];
        out << files[i].filename().string() << ": ";
        if (!oc.verdict) {
            ++errors;
            out << "error: " << oc.error << '\n';
            continue;
        }
        out << verdict_name(*oc.verdict) << '\n';
        switch (*oc.verdict) {
            case Verdict::RealDocument: ++real; break;
            case Verdict::PotentialFraudStructural: ++structural; break;
            case Verdict::PotentialFraudData: ++data; break;
            case Verdict::NoTemplateMatch: ++nomatch; break;
        }
    }
    out << "real:" << real << " structural:" << structural << " data:" << data << " nomatch:" << nomatch
        << " errors:" << errors << '\n';
    return 0;
}

int cmd_extract_template(const std::string& doc_path, const std::string& manifest_path, const std::string& id,
                         const std::string& label, const CommonOptions& o, std::ostream& out, std::ostream& err) {
    auto cfg = resolve_config(o);
    const fs::path mpath(manifest_path);
    const fs::path dir = mpath.has_parent_path() ? mpath.parent_path() : fs::path(".");
    TemplateManifest manifest;
    manifest.base_dir = dir;
    if (fs::exists(mpath)) manifest = load_manifest(mpath);
    if (manifest.find(id)) throw IdCollisionError(id);

    const auto doc = to_grayscale(read_png_rgb(doc_path));
    cfg = auto_tune(cfg, doc.width(), doc.height());
    const auto candidates = extract_roi_candidates(doc, cfg);

    fs::create_directories(dir);
    const RoiCandidate page{{0, 0, doc.width(), doc.height()}, doc.size(), doc};
    TemplateRecord rec = promote_candidate(page, id, label, manifest, dir);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto& c = candidates[k];
        const std::string file = id + "_roi_" + std::to_string(k) + ".png";
        write_png(dir / file, c.crop);
        rec.roi_suggestions.push_back({file, c.bounding_box, c.area});
    }
    manifest.templates.push_back(std::move(rec));
    save_manifest(manifest, mpath);

    out << "Template " << id << ": " << candidates.size() << " ROI suggestions\n";
    for (const auto& s : manifest.templates.back().roi_suggestions)
        out << "  " << s.file << " " << s.box << " area " << s.area << '\n';
    if (candidates.empty()) err << "warning: no ROI candidates found in " << doc_path << '\n';
    return 0;
}

int cmd_inspect(const std::string& sample_path, const std::string& manifest_path, const std::string& template_id,
                const std::string& out_dir, const CommonOptions& o, std::ostream& out) {
    const auto cfg = resolve_config(o);
    const auto manifest = load_manifest(manifest_path);
    const auto* rec = manifest.find(template_id);
    if (!rec) throw ParameterError("no template with id \"" + template_id + "\"");

    auto sample = read_png_rgb(sample_path);
    if (sample.width() != rec->width() || sample.height() != rec->height()) {
        out << "note: sample resized from " << sample.width() << "x" << sample.height() << " to " << rec->width()
            << "x" << rec->height() << '\n';
        sample = resize_bilinear(sample, rec->width(), rec->height());
    }
    const auto gray = to_grayscale(sample);
    const double ssim = ssim_global(*rec->image, gray, cfg.ssim);
    const int window = std::min({cfg.ssim_window, rec->width(), rec->height()});
    const auto ev = difference_evidence(ssim_windowed(*rec->image, gray, window, cfg.ssim_stride, cfg.ssim),
                                        cfg.evidence_threshold);

    fs::create_directories(out_dir);
    write_png(fs::path(out_dir) / "diff.png", ev.diff_image);
    write_png(fs::path(out_dir) / "overlay.png", draw_boxes(sample, ev.boxes));

    out << "SSIM: " << format_score(ssim) << '\n';
    out << "Boxes: " << ev.boxes.size() << '\n';
    for (const auto& b : ev.boxes) out << "  " << b << '\n';
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Document template matching and fraud verification", "veridoc"};
    app.require_subcommand(1, 1);

    CommonOptions opts;
    std::string sample, report, dir, reports, doc, manifest_out, id, label, template_id, inspect_out = ".";
    int jobs = 1;

    auto* verify_cmd = app.add_subcommand("verify", "verify one sample document");
    verify_cmd->add_option("sample", sample, "sample image (PNG)")->required();
    verify_cmd->add_option("--report", report, "write the JSON report here");
    add_verify_flags(verify_cmd, opts);

    auto* batch_cmd = app.add_subcommand("batch", "verify every PNG in a directory");
    batch_cmd->add_option("dir", dir, "directory of sample images")->required();
    batch_cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
    batch_cmd->add_option("--reports", reports, "report directory (default <dir>/reports)");
    add_verify_flags(batch_cmd, opts);

    auto* extract_cmd = app.add_subcommand("extract-template", "register a page as a template");
    extract_cmd->add_option("doc", doc, "exemplar document (PNG)")->required();
    extract_cmd->add_option("--out", manifest_out, "manifest to create or extend")->required();
    extract_cmd->add_option("--id", id, "template id")->required();
    extract_cmd->add_option("--label", label, "document type label");
    add_config_flags(extract_cmd, opts);

    auto* inspect_cmd = app.add_subcommand("inspect", "render difference evidence against one template");
    inspect_cmd->add_option("sample", sample, "sample image (PNG)")->required();
    inspect_cmd->add_option("--templates", opts.templates, "template manifest")->required();
    inspect_cmd->add_option("--template-id", template_id, "template to compare against")->required();
    inspect_cmd->add_option("--out", inspect_out, "output directory for diff.png and overlay.png");
    add_config_flags(inspect_cmd, opts);

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
        err << "error: " << e.what() << '\n';
        return kOperationalError;
    }

    try {
        if (*verify_cmd) return cmd_verify(sample, opts, report, out);
        if (*batch_cmd) return cmd_batch(dir, opts, reports, jobs, out);
        if (*extract_cmd) return cmd_extract_template(doc, manifest_out, id, label, opts, out, err);
        if (*inspect_cmd) return cmd_inspect(sample, opts.templates, template_id, inspect_out, opts, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kOperationalError;
    }
    return kOperationalError;
}

}  // namespace veridoc::cli
