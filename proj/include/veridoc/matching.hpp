#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "veridoc/config.hpp"
#include "veridoc/geometry.hpp"
#include "veridoc/image.hpp"
#include "veridoc/templates.hpp"

namespace veridoc {

namespace detail {

// (n·Σts − ΣtΣs) / sqrt((n·Σt² − (Σt)²)(n·Σs² − (Σs)²)) from exact integer sums.
inline double zncc_from_sums(std::int64_t n, std::int64_t st, std::int64_t ss, std::int64_t stt,
                             std::int64_t sss, std::int64_t sts) {
    using wide = __int128;
    const wide vt = wide(n) * stt - wide(st) * st;
    const wide vs = wide(n) * sss - wide(ss) * ss;
    if (vt == 0 || vs == 0) throw DegenerateInputError("zero-variance input to normalized cross-correlation");
    const wide num = wide(n) * sts - wide(st) * ss;
    const double r = static_cast<double>(num) /
                     (std::sqrt(static_cast<double>(vt)) * std::sqrt(static_cast<double>(vs)));
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace detail

/// Zero-normalized cross-correlation of two equally sized images, in [-1, 1].
/// Throws DegenerateInputError when either image is constant.
template <std::integral Scalar>
double zncc_score(const Image<Scalar>& templ, const Image<Scalar>& sample) {
    if (templ.width() != sample.width() || templ.height() != sample.height())
        throw ParameterError("zncc requires images of equal dimensions");
    const auto t = templ.plane().template cast<std::int64_t>().array();
    const auto s = sample.plane().template cast<std::int64_t>().array();
    return detail::zncc_from_sums(templ.size(), t.sum(), s.sum(), t.square().sum(), s.square().sum(), (t * s).sum());
}

struct SlidingMatch {
    Point offset;
    double score = 0;
};

/// Exhaustive ZNCC over every placement of `templ` inside `scene`. Constant windows are
/// skipped; ties keep the first placement in scan order.
SlidingMatch sliding_match(const GrayImage& templ, const GrayImage& scene);

struct MatchResult {
    std::string template_id;
    std::string image_file;
    double score = 0;
    Point offset;  ///< alignment in sample pixels
    bool matched = false;
};

struct ScoredTemplate {
    std::string id;
    double score = 0;
};

/// Highest score wins, equal scores go to the lexicographically smaller id.
ScoredTemplate select_best(std::span<const ScoredTemplate> scored);

/// Resizes the sample to each template and keeps the best ZNCC. Degenerate templates
/// are skipped; throws DegenerateInputError if nothing could be scored.
MatchResult best_template(const GrayImage& sample, const TemplateManifest& manifest, const PipelineConfig& cfg);

struct Keypoint {
    int x = 0;
    int y = 0;
    double response = 0;
};

/// Harris corners (k = 0.04, σ = 1 window) with 3×3 non-maximum suppression,
/// strongest first, capped at max_keypoints.
std::vector<Keypoint> detect_keypoints(const GrayImage& img, const KeypointParams& params);

/// Harris response map on intensities scaled to [0,1].
Image<double> harris_response(const GrayImage& img);

using DescriptorVector = Eigen::Matrix<double, 64, 1>;

/// Zero-mean, unit-norm 8×8 intensity patch; all zeros for constant patches.
struct Descriptor {
    DescriptorVector vector = DescriptorVector::Zero();
    Keypoint keypoint;
};

std::vector<Descriptor> compute_descriptors(const GrayImage& img, std::span<const Keypoint> keypoints);

struct DescriptorMatch {
    std::size_t a = 0;
    std::size_t b = 0;
    double distance = 0;
};

/// Ratio test (d1 < ratio·d2) followed by mutual-nearest filtering; ordered by index in `a`.
std::vector<DescriptorMatch> match_descriptors(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                               double ratio = 0.75);

struct Histogram {
    std::array<long long, 256> bins{};
    long long total = 0;
};

Histogram histogram(const GrayImage& img);

/// Pearson correlation of the two normalized 256-bin histograms.
double histogram_similarity(const GrayImage& a, const GrayImage& b);
double histogram_similarity(const Histogram& a, const Histogram& b);

}  // namespace veridoc
