#include "veridoc/imgproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <tuple>

namespace veridoc {

namespace {

using U8Plane = Plane<std::uint8_t>;

// Integral image of the edge-clamped padding of `img` by `pad` pixels on every side.
Plane<std::int64_t> padded_integral(const GrayImage& img, int pad) {
    const int pw = img.width() + 2 * pad;
    const int ph = img.height() + 2 * pad;
    Plane<std::int64_t> sums = Plane<std::int64_t>::Zero(ph + 1, pw + 1);
    for (int y = 0; y < ph; ++y) {
        std::int64_t row = 0;
        for (int x = 0; x < pw; ++x) {
            row += img.clamped(x - pad, y - pad);
            sums(y + 1, x + 1) = sums(y, x + 1) + row;
        }
    }
    return sums;
}

constexpr std::array<Point, 8> kClockwise{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};
constexpr int kWest = 4;

}  // namespace

GrayImage to_grayscale(const RasterImage& img) {
    U8Plane out(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out(y, x) = saturate_u8(0.299 * img(x, y, 0) + 0.587 * img(x, y, 1) + 0.114 * img(x, y, 2));
    return GrayImage(std::move(out));
}

std::vector<double> gaussian_kernel(double sigma, int size) {
    if (!(sigma > 0)) throw ParameterError("gaussian sigma must be positive");
    if (size < 1 || size % 2 == 0) throw ParameterError("gaussian kernel size must be odd and >= 1");
    const int r = size / 2;
    std::vector<double> k(size);
    double total = 0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        total += k[i + r];
    }
    for (double& w : k) w /= total;
    return k;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma, int kernel_size) {
    const auto k = gaussian_kernel(sigma, kernel_size);
    const int r = kernel_size / 2;
    const int w = img.width(), h = img.height();

    Plane<double> horiz(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * img.clamped(x + i, y);
            horiz(y, x) = acc;
        }

    U8Plane out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * horiz(std::clamp(y + i, 0, h - 1), x);
            out(y, x) = saturate_u8(acc);
        }
    return GrayImage(std::move(out));
}

BinaryImage adaptive_threshold(const GrayImage& img, int block_size, double c) {
    if (block_size < 3 || block_size % 2 == 0)
        throw ParameterError("adaptive threshold block size must be odd and >= 3");
    const int r = block_size / 2;
    const auto sums = padded_integral(img, r);
    const double count = static_cast<double>(block_size) * block_size;

    U8Plane out(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            // Padded coordinates of the block centred at (x, y) span [x, x + block_size).
            const std::int64_t s = sums(y + block_size, x + block_size) - sums(y, x + block_size) -
                                   sums(y + block_size, x) + sums(y, x);
            const double t = static_cast<double>(s) / count - c;
            out(y, x) = img(x, y) > t ? BinaryImage::kForeground : BinaryImage::kBackground;
        }
    return BinaryImage(std::move(out));
}

BinaryImage threshold(const GrayImage& img, int level) {
    U8Plane out = (img.plane().array().cast<int>() > level)
                      .select(U8Plane::Constant(img.height(), img.width(), BinaryImage::kForeground),
                              U8Plane::Zero(img.height(), img.width()));
    return BinaryImage(std::move(out));
}

BinaryImage invert(const BinaryImage& img) {
    U8Plane out = (img.plane().array() == BinaryImage::kForeground)
                      .select(U8Plane::Zero(img.height(), img.width()),
                              U8Plane::Constant(img.height(), img.width(), BinaryImage::kForeground));
    return BinaryImage(std::move(out));
}

StructuringElement::StructuringElement(Mask mask) : mask_(std::move(mask)) {
    if (mask_.rows() < 1 || mask_.cols() < 1 || mask_.rows() % 2 == 0 || mask_.cols() % 2 == 0)
        throw ParameterError("structuring element dimensions must be odd");
    if (!mask_(mask_.rows() / 2, mask_.cols() / 2))
        throw ParameterError("structuring element anchor must be set");
}

StructuringElement StructuringElement::rectangle(int width, int height) {
    if (width < 1 || height < 1) throw ParameterError("structuring element dimensions must be odd");
    return StructuringElement(Mask::Constant(height, width, true));
}

StructuringElement StructuringElement::cross(int size) {
    if (size < 1) throw ParameterError("structuring element dimensions must be odd");
    Mask m = Mask::Constant(size, size, false);
    m.row(size / 2).setConstant(true);
    m.col(size / 2).setConstant(true);
    return StructuringElement(std::move(m));
}

StructuringElement StructuringElement::reflected() const {
    return StructuringElement(Mask(mask_.reverse()));
}

namespace {

std::vector<Point> offsets_of(const StructuringElement& se) {
    std::vector<Point> out;
    for (int dy = -se.anchor_y(); dy <= se.anchor_y(); ++dy)
        for (int dx = -se.anchor_x(); dx <= se.anchor_x(); ++dx)
            if (se.contains(dx, dy)) out.push_back({dx, dy});
    return out;
}

BinaryImage erode(const BinaryImage& img, const StructuringElement& se) {
    const auto offs = offsets_of(se);
    const int w = img.width(), h = img.height();
    U8Plane out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool keep = true;
            for (const auto& o : offs) {
                const int sx = x + o.x, sy = y + o.y;
                if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
                if (!img.foreground(sx, sy)) {
                    keep = false;
                    break;
                }
            }
            out(y, x) = keep ? BinaryImage::kForeground : BinaryImage::kBackground;
        }
    return BinaryImage(std::move(out));
}

BinaryImage dilate(const BinaryImage& img, const StructuringElement& se) {
    const auto offs = offsets_of(se);
    const int w = img.width(), h = img.height();
    U8Plane out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool hit = false;
            for (const auto& o : offs) {
                const int sx = x - o.x, sy = y - o.y;
                if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
                if (img.foreground(sx, sy)) {
                    hit = true;
                    break;
                }
            }
            out(y, x) = hit ? BinaryImage::kForeground : BinaryImage::kBackground;
        }
    return BinaryImage(std::move(out));
}

}  // namespace

BinaryImage morphology(const BinaryImage& img, MorphOp op, const StructuringElement& se) {
    switch (op) {
        case MorphOp::erode: return erode(img, se);
        case MorphOp::dilate: return dilate(img, se);
        case MorphOp::open: return dilate(erode(img, se), se);
        case MorphOp::close: return erode(dilate(img, se), se);
    }
    throw ParameterError("unknown morphology operation");
}

Gradients sobel_gradients(const GrayImage& img) {
    const int w = img.width(), h = img.height();
    Plane<double> gx(h, w), gy(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int tl = img.clamped(x - 1, y - 1), tc = img.clamped(x, y - 1), tr = img.clamped(x + 1, y - 1);
            const int ml = img.clamped(x - 1, y), mr = img.clamped(x + 1, y);
            const int bl = img.clamped(x - 1, y + 1), bc = img.clamped(x, y + 1), br = img.clamped(x + 1, y + 1);
            gx(y, x) = (tr + 2 * mr + br) - (tl + 2 * ml + bl);
            gy(y, x) = (bl + 2 * bc + br) - (tl + 2 * tc + tr);
        }
    return {Image<double>(std::move(gx)), Image<double>(std::move(gy))};
}

GrayImage sobel_magnitude(const GrayImage& img) {
    if (img.width() < 3 || img.height() < 3) throw ParameterError("sobel requires an image of at least 3x3");
    const auto g = sobel_gradients(img);
    U8Plane out = (g.gx.plane().array().square() + g.gy.plane().array().square())
                      .sqrt()
                      .round()
                      .min(255.0)
                      .cast<std::uint8_t>();
    return GrayImage(std::move(out));
}

std::vector<Contour> find_contours(const BinaryImage& img) {
    const int w = img.width(), h = img.height();
    Plane<int> labels = Plane<int>::Zero(h, w);

    struct Component {
        Contour contour;
        Point first;
    };
    std::vector<Component> comps;

    auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h; };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!img.foreground(x, y) || labels(y, x) != 0) continue;
            const int label = static_cast<int>(comps.size()) + 1;
            Contour c;
            int minx = x, maxx = x, miny = y, maxy = y;
            std::deque<Point> queue{{x, y}};
            labels(y, x) = label;
            while (!queue.empty()) {
                const Point p = queue.front();
                queue.pop_front();
                ++c.area;
                minx = std::min(minx, p.x), maxx = std::max(maxx, p.x);
                miny = std::min(miny, p.y), maxy = std::max(maxy, p.y);
                for (const auto& d : kClockwise) {
                    const int nx = p.x + d.x, ny = p.y + d.y;
                    if (inside(nx, ny) && img.foreground(nx, ny) && labels(ny, nx) == 0) {
                        labels(ny, nx) = label;
                        queue.push_back({nx, ny});
                    }
                }
            }
            c.bounding_box = {minx, miny, maxx - minx + 1, maxy - miny + 1};

            // Outer border following: (x, y) is the first pixel in raster order, so its
            // west neighbour is background.
            auto on = [&](Point p) { return inside(p.x, p.y) && labels(p.y, p.x) == label; };
            auto step = [](Point p, int dir) { return Point{p.x + kClockwise[dir].x, p.y + kClockwise[dir].y}; };
            auto dir_to = [](Point from, Point to) {
                for (int d = 0; d < 8; ++d)
                    if (from.x + kClockwise[d].x == to.x && from.y + kClockwise[d].y == to.y) return d;
                return 0;
            };

            const Point start{x, y};
            Point p1{};
            bool found = false;
            for (int i = 0; i < 8 && !found; ++i) {
                const Point q = step(start, (kWest + i) % 8);
                if (on(q)) p1 = q, found = true;
            }
            if (!found) {
                c.points.push_back(start);
            } else {
                Point p2 = p1, p3 = start;
                for (;;) {
                    c.points.push_back(p3);
                    const int back = dir_to(p3, p2);
                    Point p4 = p2;
                    for (int i = 1; i <= 8; ++i) {
                        const Point q = step(p3, ((back - i) % 8 + 8) % 8);
                        if (on(q)) {
                            p4 = q;
                            break;
                        }
                    }
                    if (p4 == start && p3 == p1) break;
                    p2 = p3;
                    p3 = p4;
                }
            }
            comps.push_back({std::move(c), start});
        }

    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        const auto& ra = a.contour.bounding_box;
        const auto& rb = b.contour.bounding_box;
        return std::tie(ra.y, ra.x, a.first.y, a.first.x) < std::tie(rb.y, rb.x, b.first.y, b.first.x);
    });
    std::vector<Contour> out;
    out.reserve(comps.size());
    for (auto& c : comps) out.push_back(std::move(c.contour));
    return out;
}

namespace {

struct Tap {
    int i0, i1;
    double f;
};

std::vector<Tap> bilinear_taps(int src, int dst) {
    const double scale = static_cast<double>(src) / dst;
    std::vector<Tap> taps(dst);
    for (int d = 0; d < dst; ++d) {
        const double s = std::clamp((d + 0.5) * scale - 0.5, 0.0, static_cast<double>(src - 1));
        const int i0 = static_cast<int>(std::floor(s));
        taps[d] = {i0, std::min(i0 + 1, src - 1), s - i0};
    }
    return taps;
}

void check_resize_dims(int w, int h) {
    if (w < 1 || h < 1) throw ParameterError("resize target dimensions must be >= 1");
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height) {
    check_resize_dims(new_width, new_height);
    const auto tx = bilinear_taps(img.width(), new_width);
    const auto ty = bilinear_taps(img.height(), new_height);
    U8Plane out(new_height, new_width);
    for (int y = 0; y < new_height; ++y) {
        const auto& vy = ty[y];
        for (int x = 0; x < new_width; ++x) {
            const auto& vx = tx[x];
            const double top = (1 - vx.f) * img(vx.i0, vy.i0) + vx.f * img(vx.i1, vy.i0);
            const double bot = (1 - vx.f) * img(vx.i0, vy.i1) + vx.f * img(vx.i1, vy.i1);
            out(y, x) = saturate_u8((1 - vy.f) * top + vy.f * bot);
        }
    }
    return GrayImage(std::move(out));
}

RasterImage resize_bilinear(const RasterImage& img, int new_width, int new_height) {
    check_resize_dims(new_width, new_height);
    const auto tx = bilinear_taps(img.width(), new_width);
    const auto ty = bilinear_taps(img.height(), new_height);
    U8Plane out(new_height, 3 * new_width);
    for (int y = 0; y < new_height; ++y) {
        const auto& vy = ty[y];
        for (int x = 0; x < new_width; ++x) {
            const auto& vx = tx[x];
            for (int c = 0; c < 3; ++c) {
                const double top = (1 - vx.f) * img(vx.i0, vy.i0, c) + vx.f * img(vx.i1, vy.i0, c);
                const double bot = (1 - vx.f) * img(vx.i0, vy.i1, c) + vx.f * img(vx.i1, vy.i1, c);
                out(y, 3 * x + c) = saturate_u8((1 - vy.f) * top + vy.f * bot);
            }
        }
    }
    return RasterImage(new_width, std::move(out));
}

GrayImage crop(const GrayImage& img, const Rect& r) {
    const Rect c = r.intersect({0, 0, img.width(), img.height()});
    if (c.empty()) throw ParameterError("crop rectangle does not intersect the image");
    return GrayImage(Plane<std::uint8_t>(img.plane().block(c.y, c.x, c.h, c.w)));
}

}  // namespace veridoc
