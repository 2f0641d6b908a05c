#include "veridoc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace veridoc {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + " must be an object", 0);
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) throw ParseError("unknown config key \"" + where + item.key() + "\"", 0);
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void SsimConstants::validate() const {
    require(k1 > 0 && k2 > 0, "ssim constants k1, k2 must be positive");
    require(dynamic_range > 0, "ssim dynamic range must be positive");
}

void PipelineConfig::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    require(unit(match_threshold), "match_threshold must lie in [0,1]");
    require(unit(ssim_threshold), "ssim_threshold must lie in [0,1]");
    require(unit(confidence_threshold), "confidence_threshold must lie in [0,1]");
    const auto& w = confidence_weights;
    require(w.match >= 0 && w.ssim >= 0 && w.ocr >= 0, "confidence weights must be non-negative");
    require(std::abs(w.match + w.ssim + w.ocr - 1.0) < 1e-9, "confidence weights must sum to 1");
    ssim.validate();
    require(ssim_window >= 1 && ssim_stride >= 1, "ssim window and stride must be >= 1");
    require(evidence_threshold >= 0, "evidence_threshold must be non-negative");
    const auto& p = preprocess;
    require(p.blur_sigma > 0, "blur_sigma must be positive");
    require(p.blur_kernel >= 1 && p.blur_kernel % 2 == 1, "blur_kernel must be odd");
    require(p.block_size >= 3 && p.block_size % 2 == 1, "block_size must be odd and >= 3");
    require(p.se_size >= 1 && p.se_size % 2 == 1, "se_size must be odd");
    require(p.min_roi_area >= 0, "min_roi_area must be non-negative");
    require(keypoints.max_keypoints >= 0, "max_keypoints must be non-negative");
    require(keypoints.ratio > 0 && keypoints.ratio <= 1, "ratio must lie in (0,1]");
}

int nearest_odd(double v) {
    int lo = static_cast<int>(std::floor(v));
    if (lo % 2 == 0) --lo;
    const int hi = lo + 2;
    return (v - lo <= hi - v) ? lo : hi;
}

PipelineConfig auto_tune(const PipelineConfig& cfg, int width, int height) {
    if (!cfg.adaptive_parameters) return cfg;
    PipelineConfig out = cfg;
    const double shorter = std::min(width, height);
    out.preprocess.blur_kernel = nearest_odd(std::max(3.0, shorter / 256.0));
    out.preprocess.block_size = std::max(3, nearest_odd(shorter / 32.0));
    out.preprocess.min_roi_area = std::llround(0.001 * width * height);
    return out;
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c) {
    try {
        reject_unknown(j,
                       {"match_threshold", "ssim_threshold", "confidence_threshold", "confidence_weights", "ssim",
                        "ssim_window", "ssim_stride", "evidence_threshold", "preprocess", "keypoints", "match_mode",
                        "adaptive_parameters", "no_match_display"},
                       "");
        read(j, "match_threshold", c.match_threshold);
        read(j, "ssim_threshold", c.ssim_threshold);
        read(j, "confidence_threshold", c.confidence_threshold);
        if (j.contains("confidence_weights")) {
            const auto& w = j.at("confidence_weights");
            reject_unknown(w, {"match", "ssim", "ocr"}, "confidence_weights.");
            read(w, "match", c.confidence_weights.match);
            read(w, "ssim", c.confidence_weights.ssim);
            read(w, "ocr", c.confidence_weights.ocr);
        }
        if (j.contains("ssim")) {
            const auto& s = j.at("ssim");
            reject_unknown(s, {"k1", "k2", "dynamic_range"}, "ssim.");
            read(s, "k1", c.ssim.k1);
            read(s, "k2", c.ssim.k2);
            read(s, "dynamic_range", c.ssim.dynamic_range);
        }
        read(j, "ssim_window", c.ssim_window);
        read(j, "ssim_stride", c.ssim_stride);
        read(j, "evidence_threshold", c.evidence_threshold);
        if (j.contains("preprocess")) {
            const auto& p = j.at("preprocess");
            reject_unknown(p,
                           {"blur_sigma", "blur_kernel", "block_size", "threshold_offset", "se_size", "min_roi_area",
                            "edge_threshold"},
                           "preprocess.");
            read(p, "blur_sigma", c.preprocess.blur_sigma);
            read(p, "blur_kernel", c.preprocess.blur_kernel);
            read(p, "block_size", c.preprocess.block_size);
            read(p, "threshold_offset", c.preprocess.threshold_offset);
            read(p, "se_size", c.preprocess.se_size);
            read(p, "min_roi_area", c.preprocess.min_roi_area);
            read(p, "edge_threshold", c.preprocess.edge_threshold);
        }
        if (j.contains("keypoints")) {
            const auto& k = j.at("keypoints");
            reject_unknown(k, {"corner_threshold", "max_keypoints", "ratio"}, "keypoints.");
            read(k, "corner_threshold", c.keypoints.corner_threshold);
            read(k, "max_keypoints", c.keypoints.max_keypoints);
            read(k, "ratio", c.keypoints.ratio);
        }
        if (j.contains("match_mode")) {
            const auto mode = j.at("match_mode").get<std::string>();
            if (mode == "row") c.match_mode = MatchMode::row;
            else if (mode == "any") c.match_mode = MatchMode::any;
            else throw ParseError("match_mode must be \"row\" or \"any\"", 0);
        }
        read(j, "adaptive_parameters", c.adaptive_parameters);
        read(j, "no_match_display", c.no_match_display);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid config: ") + e.what(), 0);
    }
    c.validate();
    return c;
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    const auto& p = c.preprocess;
    return {
        {"match_threshold", c.match_threshold},
        {"ssim_threshold", c.ssim_threshold},
        {"confidence_threshold", c.confidence_threshold},
        {"confidence_weights",
         {{"match", c.confidence_weights.match}, {"ssim", c.confidence_weights.ssim}, {"ocr", c.confidence_weights.ocr}}},
        {"ssim", {{"k1", c.ssim.k1}, {"k2", c.ssim.k2}, {"dynamic_range", c.ssim.dynamic_range}}},
        {"ssim_window", c.ssim_window},
        {"ssim_stride", c.ssim_stride},
        {"evidence_threshold", c.evidence_threshold},
        {"preprocess",
         {{"blur_sigma", p.blur_sigma},
          {"blur_kernel", p.blur_kernel},
          {"block_size", p.block_size},
          {"threshold_offset", p.threshold_offset},
          {"se_size", p.se_size},
          {"min_roi_area", p.min_roi_area},
          {"edge_threshold", p.edge_threshold}}},
        {"keypoints",
         {{"corner_threshold", c.keypoints.corner_threshold},
          {"max_keypoints", c.keypoints.max_keypoints},
          {"ratio", c.keypoints.ratio}}},
        {"match_mode", c.match_mode == MatchMode::row ? "row" : "any"},
        {"adaptive_parameters", c.adaptive_parameters},
        {"no_match_display", c.no_match_display},
    };
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what(), 0);
    }
    return config_from_json(j);
}

}  // namespace veridoc
