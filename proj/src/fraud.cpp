#include "veridoc/fraud.hpp"

#include <algorithm>

#include "veridoc/imgproc.hpp"

namespace veridoc {

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::NoTemplateMatch: return "NoTemplateMatch";
        case Verdict::PotentialFraudStructural: return "PotentialFraudStructural";
        case Verdict::PotentialFraudData: return "PotentialFraudData";
        case Verdict::RealDocument: return "RealDocument";
    }
    return "";
}

std::string verdict_display(Verdict v, const PipelineConfig& cfg) {
    switch (v) {
        case Verdict::NoTemplateMatch: return cfg.no_match_display;
        case Verdict::PotentialFraudStructural: return "Potential Fraud";
        case Verdict::PotentialFraudData: return "Error in data: Potential Fraud";
        case Verdict::RealDocument: return "REAL DOCUMENT";
    }
    return "";
}

int verdict_exit_code(Verdict v) {
    switch (v) {
        case Verdict::RealDocument: return 0;
        case Verdict::PotentialFraudStructural: return 2;
        case Verdict::PotentialFraudData: return 3;
        case Verdict::NoTemplateMatch: return 4;
    }
    return 1;
}

double cumulative_confidence(double match_score, double ssim_score, double ocr_confidence,
                             const ConfidenceWeights& w) {
    return w.match * std::clamp(match_score, 0.0, 1.0) + w.ssim * std::clamp(ssim_score, 0.0, 1.0) +
           w.ocr * std::clamp(ocr_confidence, 0.0, 1.0);
}

Verdict decide_verdict(double match_score, double ssim, bool attributes_passed, double cumulative,
                       const PipelineConfig& cfg) {
    if (match_score < cfg.match_threshold) return Verdict::NoTemplateMatch;
    if (ssim < cfg.ssim_threshold) return Verdict::PotentialFraudStructural;
    if (!attributes_passed || cumulative < cfg.confidence_threshold) return Verdict::PotentialFraudData;
    return Verdict::RealDocument;
}

namespace {

Diagnostics diagnose(const GrayImage& templ, const GrayImage& sample, const KeypointParams& params) {
    Diagnostics d;
    d.histogram_similarity = histogram_similarity(templ, sample);
    if (templ.width() < 16 || templ.height() < 16) return d;
    const auto kt = detect_keypoints(templ, params);
    const auto ks = detect_keypoints(sample, params);
    d.keypoints_template = kt.size();
    d.keypoints_sample = ks.size();
    const auto dt = compute_descriptors(templ, kt);
    const auto ds = compute_descriptors(sample, ks);
    d.keypoint_matches = match_descriptors(dt, ds, params.ratio).size();
    return d;
}

}  // namespace

VerificationReport verify(const RasterImage& sample, const TemplateManifest& manifest, const ReferenceDataset& dataset,
                          OcrEngine& engine, const PipelineConfig& base_cfg) {
    base_cfg.validate();
    const PipelineConfig cfg = auto_tune(base_cfg, sample.width(), sample.height());

    VerificationReport r;
    r.sample_width = sample.width();
    r.sample_height = sample.height();
    const GrayImage gray = to_grayscale(sample);
    r.best = best_template(gray, manifest, cfg);
    const TemplateRecord& rec = *manifest.find(r.best.template_id);
    r.doc_type_label = rec.doc_type_label;

    auto finish = [&](double ssim, Verdict v) {
        r.confidence.match_score = r.best.score;
        r.confidence.ssim_score = ssim;
        r.confidence.cumulative = cumulative_confidence(r.best.score, ssim, r.confidence.ocr_confidence,
                                                        cfg.confidence_weights);
        r.verdict = v;
        return r;
    };

    if (!r.best.matched) return finish(0.0, Verdict::NoTemplateMatch);

    const GrayImage aligned = resize_bilinear(gray, rec.width(), rec.height());
    const double ssim = ssim_global(*rec.image, aligned, cfg.ssim);
    r.ssim = ssim;
    r.diagnostics = diagnose(*rec.image, aligned, cfg.keypoints);

    if (ssim < cfg.ssim_threshold) {
        const int window = std::min({cfg.ssim_window, rec.width(), rec.height()});
        if (window >= 2)
            r.evidence = difference_evidence(ssim_windowed(*rec.image, aligned, window, cfg.ssim_stride, cfg.ssim),
                                             cfg.evidence_threshold);
        return finish(ssim, Verdict::PotentialFraudStructural);
    }

    std::vector<std::string> dataset_fields;
    for (const auto& f : rec.required_fields) {
        if (dataset.column_index(f)) {
            dataset_fields.push_back(f);
            continue;
        }
        const bool is_region = std::any_of(rec.text_regions.begin(), rec.text_regions.end(),
                                           [&](const FieldRegion& fr) { return fr.field == f; });
        if (!is_region)
            throw ManifestError("required field \"" + f + "\" of template \"" + rec.id +
                                "\" is neither a text region nor a dataset column");
    }

    const auto regions = localize_text_regions(gray, rec, r.best);
    r.segments = engine.extract(gray, regions);
    r.normalized_text = normalize_text(r.segments);
    auto attrs = check_attributes(r.normalized_text, dataset, dataset_fields, cfg.match_mode);
    r.attributes_passed = attrs.passed;
    r.checks = std::move(attrs.checks);
    r.matched_row_index = attrs.matched_row;
    r.confidence.ocr_confidence = mean_confidence(r.segments);

    finish(ssim, Verdict::RealDocument);
    r.verdict = decide_verdict(r.best.score, ssim, r.attributes_passed, r.confidence.cumulative, cfg);
    return r;
}

nlohmann::json report_to_json(const VerificationReport& r, const PipelineConfig& cfg, const std::string& sample_name,
                              const std::string& diff_image) {
    using nlohmann::json;
    auto rect = [](const Rect& b) { return json::array({b.x, b.y, b.w, b.h}); };

    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"column", c.column}, {"expected", c.expected}, {"found", c.found}});
    json segments = json::array();
    for (const auto& s : r.segments)
        segments.push_back({{"field", s.region.field_name},
                            {"box", rect(s.region.box)},
                            {"text", s.text},
                            {"confidence", s.confidence}});

    json j = {
        {"schema_version", VerificationReport::kSchemaVersion},
        {"sample", sample_name},
        {"sample_size", {r.sample_width, r.sample_height}},
        {"best",
         {{"template_id", r.best.template_id},
          {"image_file", r.best.image_file},
          {"score", r.best.score},
          {"offset", {r.best.offset.x, r.best.offset.y}},
          {"matched", r.best.matched}}},
        {"doc_type_label", r.doc_type_label},
        {"ssim", r.ssim ? json(*r.ssim) : json(nullptr)},
        {"ocr_segments", segments},
        {"normalized_text", r.normalized_text},
        {"attributes_passed", r.attributes_passed},
        {"checks", checks},
        {"matched_row_index", r.matched_row_index ? json(*r.matched_row_index) : json(nullptr)},
        {"confidence",
         {{"match_score", r.confidence.match_score},
          {"ssim_score", r.confidence.ssim_score},
          {"ocr_confidence", r.confidence.ocr_confidence},
          {"cumulative", r.confidence.cumulative}}},
        {"verdict", verdict_name(r.verdict)},
        {"verdict_display", verdict_display(r.verdict, cfg)},
    };
    if (r.diagnostics)
        j["diagnostics"] = {{"histogram_similarity", r.diagnostics->histogram_similarity},
                            {"keypoints_template", r.diagnostics->keypoints_template},
                            {"keypoints_sample", r.diagnostics->keypoints_sample},
                            {"keypoint_matches", r.diagnostics->keypoint_matches}};
    else
        j["diagnostics"] = nullptr;
    if (r.evidence) {
        json boxes = json::array();
        for (const auto& b : r.evidence->boxes) boxes.push_back(rect(b));
        j["evidence"] = {{"boxes", boxes}, {"diff_image", diff_image.empty() ? json(nullptr) : json(diff_image)}};
    } else {
        j["evidence"] = nullptr;
    }
    return j;
}

}  // namespace veridoc
