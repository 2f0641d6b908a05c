#include "veridoc/matching.hpp"

#include <limits>
#include <map>

#include "veridoc/imgproc.hpp"

namespace veridoc {

SlidingMatch sliding_match(const GrayImage& templ, const GrayImage& scene) {
    const int tw = templ.width(), th = templ.height();
    if (tw > scene.width() || th > scene.height()) throw ParameterError("template larger than scene");

    const auto t = templ.plane().cast<std::int64_t>().array();
    const std::int64_t n = templ.size(), st = t.sum(), stt = t.square().sum();
    if (n * stt - st * st == 0) throw DegenerateInputError("template has zero variance");

    SlidingMatch best;
    bool found = false;
    for (int oy = 0; oy + th <= scene.height(); ++oy)
        for (int ox = 0; ox + tw <= scene.width(); ++ox) {
            std::int64_t ss = 0, sss = 0, sts = 0;
            for (int y = 0; y < th; ++y)
                for (int x = 0; x < tw; ++x) {
                    const std::int64_t s = scene(ox + x, oy + y);
                    ss += s;
                    sss += s * s;
                    sts += s * templ(x, y);
                }
            if (n * sss - ss * ss == 0) continue;
            const double score = detail::zncc_from_sums(n, st, ss, stt, sss, sts);
            if (!found || score > best.score) {
                best = {{ox, oy}, score};
                found = true;
            }
        }
    if (!found) throw DegenerateInputError("scene has no non-constant window");
    return best;
}

ScoredTemplate select_best(std::span<const ScoredTemplate> scored) {
    if (scored.empty()) throw DegenerateInputError("no template could be scored");
    const ScoredTemplate* best = &scored.front();
    for (const auto& s : scored)
        if (s.score > best->score || (s.score == best->score && s.id < best->id)) best = &s;
    return *best;
}

MatchResult best_template(const GrayImage& sample, const TemplateManifest& manifest, const PipelineConfig& cfg) {
    if (manifest.templates.empty()) throw ParameterError("template manifest is empty");
    std::vector<ScoredTemplate> scored;
    std::map<std::pair<int, int>, GrayImage> resized;
    for (const auto& rec : manifest.templates) {
        const auto key = std::make_pair(rec.width(), rec.height());
        auto it = resized.find(key);
        if (it == resized.end()) it = resized.emplace(key, resize_bilinear(sample, key.first, key.second)).first;
        try {
            scored.push_back({rec.id, zncc_score(*rec.image, it->second)});
        } catch (const DegenerateInputError&) {
        }
    }
    const auto best = select_best(scored);
    const auto* rec = manifest.find(best.id);
    return {best.id, rec->image_file, best.score, {0, 0}, best.score >= cfg.match_threshold};
}

namespace {

Plane<double> gaussian_filter(const Plane<double>& src, double sigma, int size) {
    const auto k = gaussian_kernel(sigma, size);
    const int r = size / 2;
    const int h = static_cast<int>(src.rows()), w = static_cast<int>(src.cols());
    Plane<double> tmp(h, w), out(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * src(y, std::clamp(x + i, 0, w - 1));
            tmp(y, x) = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(std::clamp(y + i, 0, h - 1), x);
            out(y, x) = acc;
        }
    return out;
}

constexpr double kHarrisK = 0.04;
constexpr double kWindowSigma = 1.0;
constexpr int kWindowSize = 7;

}  // namespace

Image<double> harris_response(const GrayImage& img) {
    const auto g = sobel_gradients(img);
    // Sobel sums 8 unit differences; scale to intensity-per-pixel on [0,1] intensities.
    const double scale = 1.0 / (8.0 * 255.0);
    const Plane<double> gx = g.gx.plane() * scale;
    const Plane<double> gy = g.gy.plane() * scale;
    const Plane<double> a = gaussian_filter(gx.cwiseProduct(gx), kWindowSigma, kWindowSize);
    const Plane<double> b = gaussian_filter(gy.cwiseProduct(gy), kWindowSigma, kWindowSize);
    const Plane<double> c = gaussian_filter(gx.cwiseProduct(gy), kWindowSigma, kWindowSize);
    Plane<double> r = a.cwiseProduct(b) - c.cwiseProduct(c) - kHarrisK * (a + b).cwiseAbs2();
    return Image<double>(std::move(r));
}

std::vector<Keypoint> detect_keypoints(const GrayImage& img, const KeypointParams& params) {
    if (img.width() < 16 || img.height() < 16) throw ParameterError("keypoint detection needs at least 16x16");
    const auto resp = harris_response(img);
    const int w = img.width(), h = img.height();

    std::vector<Keypoint> kps;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = resp(x, y);
            if (!(v > params.corner_threshold)) continue;
            bool peak = true;
            for (int dy = -1; dy <= 1 && peak; ++dy)
                for (int dx = -1; dx <= 1 && peak; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const double u = resp(nx, ny);
                    // Plateaus keep their first pixel in scan order.
                    const bool earlier = dy < 0 || (dy == 0 && dx < 0);
                    if (u > v || (earlier && u == v)) peak = false;
                }
            if (peak) kps.push_back({x, y, v});
        }
    std::stable_sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
    if (kps.size() > static_cast<std::size_t>(params.max_keypoints)) kps.resize(params.max_keypoints);
    return kps;
}

std::vector<Descriptor> compute_descriptors(const GrayImage& img, std::span<const Keypoint> keypoints) {
    std::vector<Descriptor> out;
    out.reserve(keypoints.size());
    for (const auto& kp : keypoints) {
        Descriptor d;
        d.keypoint = kp;
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) d.vector(j * 8 + i) = img.clamped(kp.x - 4 + i, kp.y - 4 + j);
        d.vector.array() -= d.vector.mean();
        const double norm = d.vector.norm();
        if (norm > 1e-12) d.vector /= norm;
        else d.vector.setZero();
        out.push_back(d);
    }
    return out;
}

std::vector<DescriptorMatch> match_descriptors(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                               double ratio) {
    if (!(ratio > 0 && ratio <= 1)) throw ParameterError("ratio must lie in (0,1]");
    std::vector<DescriptorMatch> out;
    if (a.empty() || b.empty()) return out;

    // Nearest descriptor in `a` for every element of `b`, for the mutual check.
    std::vector<std::size_t> back(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = (a[i].vector - b[j].vector).norm();
            if (d < best) best = d, back[j] = i;
        }
    }

    for (std::size_t i = 0; i < a.size(); ++i) {
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        std::size_t j1 = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = (a[i].vector - b[j].vector).norm();
            if (d < d1) {
                d2 = d1;
                d1 = d;
                j1 = j;
            } else if (d < d2) {
                d2 = d;
            }
        }
        if (d1 < ratio * d2 && back[j1] == i) out.push_back({i, j1, d1});
    }
    return out;
}

Histogram histogram(const GrayImage& img) {
    Histogram h;
    for (auto v : img.pixels()) ++h.bins[v];
    h.total = img.size();
    return h;
}

double histogram_similarity(const Histogram& a, const Histogram& b) {
    Eigen::Array<double, 256, 1> pa, pb;
    for (int i = 0; i < 256; ++i) {
        pa(i) = static_cast<double>(a.bins[i]) / static_cast<double>(a.total);
        pb(i) = static_cast<double>(b.bins[i]) / static_cast<double>(b.total);
    }
    const auto ca = pa - pa.mean();
    const auto cb = pb - pb.mean();
    const double va = ca.square().sum(), vb = cb.square().sum();
    if (va == 0 || vb == 0) {
        if (va == 0 && vb == 0 && (pa == pb).all()) return 1.0;
        return 0.0;
    }
    return std::clamp((ca * cb).sum() / std::sqrt(va * vb), -1.0, 1.0);
}

double histogram_similarity(const GrayImage& a, const GrayImage& b) {
    return histogram_similarity(histogram(a), histogram(b));
}

}  // namespace veridoc
