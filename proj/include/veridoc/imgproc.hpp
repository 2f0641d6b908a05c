#pragma once

#include <cstdint>
#include <vector>

#include "veridoc/geometry.hpp"
#include "veridoc/image.hpp"

namespace veridoc {

/// BT.601 luma, Y = round(0.299 R + 0.587 G + 0.114 B).
GrayImage to_grayscale(const RasterImage& img);

/// Normalized 1-D Gaussian weights of odd length `size`.
std::vector<double> gaussian_kernel(double sigma, int size);

/// Separable Gaussian smoothing with edge-clamp borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma, int kernel_size);

/// Pixel becomes foreground when it exceeds the mean of its block_size² neighborhood minus `c`.
BinaryImage adaptive_threshold(const GrayImage& img, int block_size, double c);

/// Global threshold: foreground where value > level.
BinaryImage threshold(const GrayImage& img, int level);

BinaryImage invert(const BinaryImage& img);

class StructuringElement {
public:
    using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    /// Mask must have odd dimensions and a set anchor (center) cell.
    explicit StructuringElement(Mask mask);

    static StructuringElement rectangle(int width, int height);
    static StructuringElement cross(int size);

    int width() const { return static_cast<int>(mask_.cols()); }
    int height() const { return static_cast<int>(mask_.rows()); }
    int anchor_x() const { return width() / 2; }
    int anchor_y() const { return height() / 2; }

    /// Membership by offset from the anchor.
    bool contains(int dx, int dy) const { return mask_(dy + anchor_y(), dx + anchor_x()); }

    StructuringElement reflected() const;
    const Mask& mask() const { return mask_; }

private:
    Mask mask_;
};

enum class MorphOp { erode, dilate, open, close };

/// Set morphology on the 255-valued foreground. Pixels outside the image never
/// contribute: dilation sees them as background, erosion ignores them.
BinaryImage morphology(const BinaryImage& img, MorphOp op, const StructuringElement& se);

/// Raw 3×3 Sobel derivatives (edge-clamped), unscaled.
struct Gradients {
    Image<double> gx;
    Image<double> gy;
};
Gradients sobel_gradients(const GrayImage& img);

/// min(255, round(|∇|)) of the 3×3 Sobel gradient.
GrayImage sobel_magnitude(const GrayImage& img);

struct Contour {
    std::vector<Point> points;  ///< outer boundary, traced clockwise from the top-left pixel
    Rect bounding_box;
    long long area = 0;  ///< pixel count of the component
};

/// One outer boundary per 8-connected foreground component, ordered by bounding-box
/// origin (top-to-bottom, then left-to-right).
std::vector<Contour> find_contours(const BinaryImage& img);

GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height);
RasterImage resize_bilinear(const RasterImage& img, int new_width, int new_height);

/// Copy of `r ∩ bounds`; throws ParameterError if the intersection is empty.
GrayImage crop(const GrayImage& img, const Rect& r);

}  // namespace veridoc
