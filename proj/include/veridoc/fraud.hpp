#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "veridoc/config.hpp"
#include "veridoc/dataset.hpp"
#include "veridoc/matching.hpp"
#include "veridoc/ocr.hpp"
#include "veridoc/ssim.hpp"
#include "veridoc/templates.hpp"

namespace veridoc {

enum class Verdict {
    NoTemplateMatch,
    PotentialFraudStructural,
    PotentialFraudData,
    RealDocument,
};

std::string_view verdict_name(Verdict v);
/// Printed verdict line; NoTemplateMatch uses cfg.no_match_display.
std::string verdict_display(Verdict v, const PipelineConfig& cfg);
/// 0 real, 2 structural, 3 data, 4 no match.
int verdict_exit_code(Verdict v);

struct ConfidenceBundle {
    double match_score = 0;
    double ssim_score = 0;
    double ocr_confidence = 1.0;
    double cumulative = 0;
};

/// Weighted mean of clamp(match,0,1), clamp(ssim,0,1) and ocr.
double cumulative_confidence(double match_score, double ssim_score, double ocr_confidence,
                             const ConfidenceWeights& weights);

/// Decision table, first failing stage wins:
///   score < match_threshold → NoTemplateMatch
///   ssim < ssim_threshold → PotentialFraudStructural
///   attributes fail or cumulative < confidence_threshold → PotentialFraudData
///   otherwise RealDocument.
Verdict decide_verdict(double match_score, double ssim, bool attributes_passed, double cumulative,
                       const PipelineConfig& cfg);

/// Scores computed for the record only; they never influence the verdict.
struct Diagnostics {
    double histogram_similarity = 0;
    std::size_t keypoints_template = 0;
    std::size_t keypoints_sample = 0;
    std::size_t keypoint_matches = 0;
};

struct VerificationReport {
    static constexpr int kSchemaVersion = 1;

    MatchResult best;
    std::string doc_type_label;
    std::optional<double> ssim;
    std::optional<Diagnostics> diagnostics;
    std::vector<OcrSegment> segments;
    std::string normalized_text;
    bool attributes_passed = false;
    std::vector<AttributeCheck> checks;
    std::optional<std::size_t> matched_row_index;
    ConfidenceBundle confidence;
    Verdict verdict = Verdict::NoTemplateMatch;
    std::optional<DifferenceEvidence> evidence;
    int sample_width = 0;
    int sample_height = 0;
};

/// Full pipeline for one sample. The config is auto-tuned to the sample when
/// adaptive_parameters is set.
VerificationReport verify(const RasterImage& sample, const TemplateManifest& manifest, const ReferenceDataset& dataset,
                          OcrEngine& engine, const PipelineConfig& cfg);

/// Versioned JSON form of a report; `diff_image` is recorded when evidence was written to disk.
nlohmann::json report_to_json(const VerificationReport& r, const PipelineConfig& cfg,
                              const std::string& sample_name = {}, const std::string& diff_image = {});

}  // namespace veridoc
