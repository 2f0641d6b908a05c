#include "veridoc/ssim.hpp"

#include <algorithm>

#include "veridoc/imgproc.hpp"

namespace veridoc {

SsimComponents ssim_components(const PairSums& s) {
    using wide = __int128;
    const double n = static_cast<double>(s.n);
    const double n2 = n * n;
    SsimComponents m;
    m.mu_x = static_cast<double>(s.sx) / n;
    m.mu_y = static_cast<double>(s.sy) / n;
    m.sigma_x2 = static_cast<double>(wide(s.n) * s.sxx - wide(s.sx) * s.sx) / n2;
    m.sigma_y2 = static_cast<double>(wide(s.n) * s.syy - wide(s.sy) * s.sy) / n2;
    m.sigma_xy = static_cast<double>(wide(s.n) * s.sxy - wide(s.sx) * s.sy) / n2;
    return m;
}

double ssim_from_components(const SsimComponents& m, const SsimConstants& k) {
    const double c1 = k.c1(), c2 = k.c2();
    const double num = (2 * m.mu_x * m.mu_y + c1) * (2 * m.sigma_xy + c2);
    const double den = (m.mu_x * m.mu_x + m.mu_y * m.mu_y + c1) * (m.sigma_x2 + m.sigma_y2 + c2);
    return std::clamp(num / den, -1.0, 1.0);
}

namespace {

std::vector<int> window_origins(int extent, int window, int stride) {
    std::vector<int> out;
    for (int p = 0; p + window <= extent; p += stride) out.push_back(p);
    if (out.back() != extent - window) out.push_back(extent - window);
    return out;
}

struct Integral {
    Plane<std::int64_t> table;

    template <typename F>
    Integral(int w, int h, F&& value) : table(Plane<std::int64_t>::Zero(h + 1, w + 1)) {
        for (int y = 0; y < h; ++y) {
            std::int64_t row = 0;
            for (int x = 0; x < w; ++x) {
                row += value(x, y);
                table(y + 1, x + 1) = table(y, x + 1) + row;
            }
        }
    }

    std::int64_t sum(int x, int y, int w, int h) const {
        return table(y + h, x + w) - table(y, x + w) - table(y + h, x) + table(y, x);
    }
};

}  // namespace

SsimReport ssim_windowed(const GrayImage& x, const GrayImage& y, int window, int stride, const SsimConstants& k) {
    if (x.width() != y.width() || x.height() != y.height())
        throw ParameterError("ssim requires images of equal dimensions");
    if (window < 2 || stride < 1) throw ParameterError("ssim window must be >= 2 and stride >= 1");
    if (window > std::min(x.width(), x.height())) throw ParameterError("ssim window larger than image");
    k.validate();

    const int w = x.width(), h = x.height();
    const Integral ix(w, h, [&](int i, int j) { return std::int64_t{x(i, j)}; });
    const Integral iy(w, h, [&](int i, int j) { return std::int64_t{y(i, j)}; });
    const Integral ixx(w, h, [&](int i, int j) { return std::int64_t{x(i, j)} * x(i, j); });
    const Integral iyy(w, h, [&](int i, int j) { return std::int64_t{y(i, j)} * y(i, j); });
    const Integral ixy(w, h, [&](int i, int j) { return std::int64_t{x(i, j)} * y(i, j); });

    SsimReport r;
    r.window = window;
    r.stride = stride;
    r.image_width = w;
    r.image_height = h;
    r.window_xs = window_origins(w, window, stride);
    r.window_ys = window_origins(h, window, stride);
    r.local_map.resize(static_cast<Eigen::Index>(r.window_ys.size()), static_cast<Eigen::Index>(r.window_xs.size()));

    const std::int64_t n = std::int64_t{window} * window;
    for (std::size_t row = 0; row < r.window_ys.size(); ++row)
        for (std::size_t col = 0; col < r.window_xs.size(); ++col) {
            const int wx = r.window_xs[col], wy = r.window_ys[row];
            const PairSums s{n,
                             ix.sum(wx, wy, window, window),
                             iy.sum(wx, wy, window, window),
                             ixx.sum(wx, wy, window, window),
                             iyy.sum(wx, wy, window, window),
                             ixy.sum(wx, wy, window, window)};
            r.local_map(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                ssim_from_components(ssim_components(s), k);
        }
    r.global_score = r.local_map.mean();
    return r;
}

DifferenceEvidence difference_evidence(const SsimReport& report, double dissimilarity_threshold) {
    Plane<double> worst = Plane<double>::Zero(report.image_height, report.image_width);
    for (std::size_t row = 0; row < report.window_ys.size(); ++row)
        for (std::size_t col = 0; col < report.window_xs.size(); ++col) {
            const double d =
                1.0 - report.local_map(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
            auto block = worst.block(report.window_ys[row], report.window_xs[col], report.window, report.window);
            block = block.cwiseMax(d);
        }

    Plane<std::uint8_t> diff = (255.0 * worst.array()).round().max(0.0).min(255.0).cast<std::uint8_t>();
    Plane<std::uint8_t> mask = (worst.array() > dissimilarity_threshold)
                                   .select(Plane<std::uint8_t>::Constant(worst.rows(), worst.cols(),
                                                                         BinaryImage::kForeground),
                                           Plane<std::uint8_t>::Zero(worst.rows(), worst.cols()));

    DifferenceEvidence ev{GrayImage(std::move(diff)), {}};
    for (const auto& c : find_contours(BinaryImage(std::move(mask)))) ev.boxes.push_back(c.bounding_box);
    return ev;
}

RasterImage draw_boxes(const RasterImage& img, std::span<const Rect> boxes, std::array<std::uint8_t, 3> color) {
    Plane<std::uint8_t> d = img.plane();
    const Rect bounds{0, 0, img.width(), img.height()};
    auto put = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
        for (int c = 0; c < 3; ++c) d(y, 3 * x + c) = color[c];
    };
    for (const auto& raw : boxes) {
        const Rect b = raw.intersect(bounds);
        if (b.empty()) continue;
        for (int x = b.x; x < b.right(); ++x) put(x, b.y), put(x, b.bottom() - 1);
        for (int y = b.y; y < b.bottom(); ++y) put(b.x, y), put(b.right() - 1, y);
    }
    return RasterImage(img.width(), std::move(d));
}

}  // namespace veridoc
