#pragma once

#include <algorithm>
#include <cmath>
#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include <Eigen/Core>

#include "veridoc/errors.hpp"

namespace veridoc {

/// Row-major dense pixel plane; rows are image rows (y), columns are x.
template <typename Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Immutable single-channel image over an arbitrary scalar type.
template <typename Scalar>
class Image {
public:
    using value_type = Scalar;

    Image(int width, int height, Scalar fill = Scalar{}) {
        if (width < 1 || height < 1) throw ParameterError("image dimensions must be >= 1");
        data_ = Plane<Scalar>::Constant(height, width, fill);
    }

    explicit Image(Plane<Scalar> data) : data_(std::move(data)) {
        if (data_.rows() < 1 || data_.cols() < 1) throw ParameterError("image dimensions must be >= 1");
    }

    int width() const { return static_cast<int>(data_.cols()); }
    int height() const { return static_cast<int>(data_.rows()); }
    long long size() const { return static_cast<long long>(data_.size()); }

    Scalar operator()(int x, int y) const { return data_(y, x); }

    /// Edge-clamp replication for out-of-range coordinates.
    Scalar clamped(int x, int y) const {
        return data_(std::clamp(y, 0, height() - 1), std::clamp(x, 0, width() - 1));
    }

    const Plane<Scalar>& plane() const { return data_; }
    std::span<const Scalar> pixels() const { return {data_.data(), static_cast<std::size_t>(data_.size())}; }

    friend bool operator==(const Image& a, const Image& b) {
        return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
               (a.data_.array() == b.data_.array()).all();
    }

private:
    Plane<Scalar> data_;
};

using GrayImage = Image<std::uint8_t>;

/// Two-level image: every pixel is 0 (background) or 255 (foreground).
class BinaryImage {
public:
    static constexpr std::uint8_t kForeground = 255;
    static constexpr std::uint8_t kBackground = 0;

    BinaryImage(int width, int height) : img_(width, height, kBackground) {}

    explicit BinaryImage(Plane<std::uint8_t> data) : img_(std::move(data)) {
        const auto& p = img_.plane();
        if (!((p.array() == kForeground) || (p.array() == kBackground)).all())
            throw ParameterError("binary image pixels must be 0 or 255");
    }

    explicit BinaryImage(const GrayImage& gray) : BinaryImage(gray.plane()) {}

    int width() const { return img_.width(); }
    int height() const { return img_.height(); }
    std::uint8_t operator()(int x, int y) const { return img_(x, y); }
    bool foreground(int x, int y) const { return img_(x, y) == kForeground; }
    const Plane<std::uint8_t>& plane() const { return img_.plane(); }
    const GrayImage& gray() const { return img_; }
    long long count() const { return (img_.plane().array() == kForeground).count(); }

    friend bool operator==(const BinaryImage& a, const BinaryImage& b) { return a.img_ == b.img_; }

private:
    GrayImage img_;
};

/// Immutable 8-bit RGB image. Storage is height × (3·width), i.e. row-major RGB triples.
class RasterImage {
public:
    RasterImage(int width, int height, std::array<std::uint8_t, 3> fill = {0, 0, 0}) {
        if (width < 1 || height < 1) throw ParameterError("image dimensions must be >= 1");
        data_.resize(height, 3 * width);
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < 3; ++c) data_.col(3 * x + c).setConstant(fill[c]);
    }

    /// `data` must be height × (3·width).
    RasterImage(int width, Plane<std::uint8_t> data) : data_(std::move(data)) {
        if (width < 1 || data_.rows() < 1 || data_.cols() != 3 * width)
            throw ParameterError("raster buffer must be height x (3*width) with width, height >= 1");
    }

    static RasterImage from_gray(const GrayImage& g) {
        Plane<std::uint8_t> d(g.height(), 3 * g.width());
        for (int y = 0; y < g.height(); ++y)
            for (int x = 0; x < g.width(); ++x)
                d(y, 3 * x) = d(y, 3 * x + 1) = d(y, 3 * x + 2) = g(x, y);
        return RasterImage(g.width(), std::move(d));
    }

    int width() const { return static_cast<int>(data_.cols() / 3); }
    int height() const { return static_cast<int>(data_.rows()); }
    std::uint8_t operator()(int x, int y, int channel) const { return data_(y, 3 * x + channel); }
    const Plane<std::uint8_t>& plane() const { return data_; }
    std::span<const std::uint8_t> pixels() const {
        return {data_.data(), static_cast<std::size_t>(data_.size())};
    }

    friend bool operator==(const RasterImage& a, const RasterImage& b) {
        return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
               (a.data_.array() == b.data_.array()).all();
    }

private:
    Plane<std::uint8_t> data_;
};

/// Round half away from zero and saturate to [0,255].
inline std::uint8_t saturate_u8(double v) {
    const double r = std::round(v);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace veridoc
