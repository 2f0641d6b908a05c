#pragma once

#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "veridoc/geometry.hpp"
#include "veridoc/image.hpp"

namespace veridoc {

/// Stabilizers of the SSIM quotient: c1 = (k1·L)², c2 = (k2·L)².
struct SsimConstants {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
    void validate() const;
};

/// Population (1/N) moments of a pair of equally sized signals.
struct SsimComponents {
    double mu_x = 0;
    double mu_y = 0;
    double sigma_x2 = 0;
    double sigma_y2 = 0;
    double sigma_xy = 0;
};

/// Exact integer raw sums; every SSIM evaluation in the library goes through these.
struct PairSums {
    std::int64_t n = 0;
    std::int64_t sx = 0, sy = 0;
    std::int64_t sxx = 0, syy = 0, sxy = 0;
};

SsimComponents ssim_components(const PairSums& s);
double ssim_from_components(const SsimComponents& m, const SsimConstants& k);

template <std::integral Scalar>
PairSums pair_sums(const Image<Scalar>& x, const Image<Scalar>& y) {
    const auto a = x.plane().template cast<std::int64_t>().array();
    const auto b = y.plane().template cast<std::int64_t>().array();
    return {static_cast<std::int64_t>(x.size()), a.sum(), b.sum(), a.square().sum(), b.square().sum(), (a * b).sum()};
}

/// Single-window SSIM over the whole image.
template <std::integral Scalar>
double ssim_global(const Image<Scalar>& x, const Image<Scalar>& y, const SsimConstants& k = {}) {
    if (x.width() != y.width() || x.height() != y.height())
        throw ParameterError("ssim requires images of equal dimensions");
    if (x.size() < 4) throw ParameterError("ssim requires at least 4 pixels");
    k.validate();
    return ssim_from_components(ssim_components(pair_sums(x, y)), k);
}

struct SsimReport {
    double global_score = 0;  ///< mean of local_map
    Plane<double> local_map;  ///< rows follow window_ys, columns window_xs
    int window = 0;
    int stride = 0;
    int image_width = 0;
    int image_height = 0;
    std::vector<int> window_xs;  ///< left edge of each window column
    std::vector<int> window_ys;  ///< top edge of each window row
};

/// Uniform-window SSIM on a stride grid. A final window flush with the right/bottom
/// edge is added when the stride does not land there, so every pixel is covered.
SsimReport ssim_windowed(const GrayImage& x, const GrayImage& y, int window = 8, int stride = 4,
                         const SsimConstants& k = {});

struct DifferenceEvidence {
    GrayImage diff_image;     ///< 255·(1 − local SSIM), worst covering window per pixel
    std::vector<Rect> boxes;  ///< low-similarity regions, find_contours order
};

DifferenceEvidence difference_evidence(const SsimReport& report, double dissimilarity_threshold);

/// Copy of `img` with single-pixel rectangle outlines.
RasterImage draw_boxes(const RasterImage& img, std::span<const Rect> boxes,
                       std::array<std::uint8_t, 3> color = {255, 0, 0});

}  // namespace veridoc
