#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "veridoc/ssim.hpp"

namespace veridoc {

/// Preprocessing used for ROI extraction and OCR binarization.
struct PreprocessParams {
    double blur_sigma = 1.0;
    int blur_kernel = 3;
    int block_size = 31;
    double threshold_offset = 10.0;
    int se_size = 3;
    long long min_roi_area = 100;
    int edge_threshold = 128;
};

struct ConfidenceWeights {
    double match = 0.4;
    double ssim = 0.4;
    double ocr = 0.2;
};

struct KeypointParams {
    double corner_threshold = 1e-4;
    int max_keypoints = 500;
    double ratio = 0.75;
};

/// How required dataset columns must co-occur in the document text.
enum class MatchMode {
    row,  ///< all required values from one single dataset row
    any,  ///< each required value from any row
};

struct PipelineConfig {
    double match_threshold = 0.6;
    double ssim_threshold = 0.8;
    double confidence_threshold = 0.7;
    ConfidenceWeights confidence_weights;
    SsimConstants ssim;
    int ssim_window = 8;
    int ssim_stride = 4;
    double evidence_threshold = 0.5;
    PreprocessParams preprocess;
    KeypointParams keypoints;
    MatchMode match_mode = MatchMode::row;
    bool adaptive_parameters = false;
    std::string no_match_display = "No Template Match";

    /// Throws ParameterError on out-of-range thresholds or weights.
    void validate() const;
};

/// Resolution-dependent preprocessing; identity when adaptive_parameters is off.
PipelineConfig auto_tune(const PipelineConfig& cfg, int width, int height);

/// Odd integer nearest to v; exact ties resolve downward.
int nearest_odd(double v);

/// Fields absent from `j` keep their value from `base`; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace veridoc
