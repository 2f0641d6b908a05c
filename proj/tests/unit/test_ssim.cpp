#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "synth.hpp"
#include "veridoc/errors.hpp"
#include "veridoc/ssim.hpp"

using namespace veridoc;

namespace {

GrayImage ramp4() {
    Plane<std::uint8_t> p(4, 4);
    for (int i = 0; i < 16; ++i) p.data()[i] = static_cast<std::uint8_t>(i);
    return GrayImage(p);
}

GrayImage with_block(const GrayImage& img, const Rect& r, std::uint8_t v) {
    Plane<std::uint8_t> p = img.plane();
    p.block(r.y, r.x, r.h, r.w).setConstant(v);
    return GrayImage(p);
}

}  // namespace

TEST(SsimGlobal, IdentityIsOne) {
    std::mt19937 rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto x = oracle::random_gray(rng, 2 + rng() % 30, 2 + rng() % 30);
        ASSERT_NEAR(ssim_global(x, x), 1.0, 1e-12);
    }
    EXPECT_NEAR(ssim_global(GrayImage(4, 4, 0), GrayImage(4, 4, 0)), 1.0, 1e-12);
}

TEST(SsimGlobal, RampPlusOffsetMatchesOracle) {
    const auto x = ramp4();
    const GrayImage y(Plane<std::uint8_t>(x.plane().array() + std::uint8_t{40}));
    const double expected = oracle::ssim(x, y);
    EXPECT_NEAR(ssim_global(x, y), expected, 1e-12);
    EXPECT_NEAR(ssim_global(x, y), 0.3100481780420677, 1e-12);
}

TEST(SsimGlobal, SymmetricAndBounded) {
    std::mt19937 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const int w = 2 + rng() % 24, h = 2 + rng() % 24;
        const auto x = oracle::random_gray(rng, w, h);
        auto y = oracle::random_gray(rng, w, h);
        if (i % 3 == 1) y = GrayImage(Plane<std::uint8_t>(255 - x.plane().array()));
        const double a = ssim_global(x, y), b = ssim_global(y, x);
        ASSERT_NEAR(a, b, 1e-12);
        ASSERT_GE(a, -1.0);
        ASSERT_LE(a, 1.0);
    }
}

TEST(SsimGlobal, MatchesBruteForceOracle) {
    std::mt19937 rng(3);
    for (int i = 0; i < 200; ++i) {
        const int w = 2 + rng() % 15, h = 2 + rng() % 15;
        const auto x = oracle::random_gray(rng, w, h);
        const auto y = oracle::random_gray(rng, w, h, rng() % 100, 155 + rng() % 101);
        ASSERT_NEAR(ssim_global(x, y), oracle::ssim(x, y), 1e-9);
    }
}

TEST(SsimGlobal, CustomConstants) {
    std::mt19937 rng(4);
    const auto x = oracle::random_gray(rng, 9, 9), y = oracle::random_gray(rng, 9, 9);
    const SsimConstants k{0.05, 0.1, 255};
    EXPECT_NEAR(ssim_global(x, y, k), oracle::ssim(x, y, 0.05, 0.1), 1e-9);
    EXPECT_THROW(ssim_global(x, y, SsimConstants{0.0, 0.03, 255}), ParameterError);
}

TEST(SsimGlobal, Errors) {
    EXPECT_THROW(ssim_global(GrayImage(4, 4), GrayImage(4, 5)), ParameterError);
    EXPECT_THROW(ssim_global(GrayImage(3, 1), GrayImage(3, 1)), ParameterError);
}

TEST(SsimWindowed, IdenticalImages) {
    std::mt19937 rng(5);
    const auto x = oracle::random_gray(rng, 30, 21);
    const auto r = ssim_windowed(x, x, 8, 4);
    EXPECT_NEAR(r.global_score, 1.0, 1e-12);
    EXPECT_TRUE((r.local_map.array() > 1.0 - 1e-12).all());
    EXPECT_EQ(r.window_xs, (std::vector<int>{0, 4, 8, 12, 16, 20, 22}));
    EXPECT_EQ(r.window_ys, (std::vector<int>{0, 4, 8, 12, 13}));
}

TEST(SsimWindowed, FullWindowEqualsGlobal) {
    std::mt19937 rng(6);
    const auto x = oracle::random_gray(rng, 12, 12), y = oracle::random_gray(rng, 12, 12);
    const auto r = ssim_windowed(x, y, 12, 5);
    ASSERT_EQ(r.local_map.size(), 1);
    EXPECT_EQ(r.global_score, ssim_global(x, y));
}

TEST(SsimWindowed, GlobalIsMeanOfLocal) {
    std::mt19937 rng(7);
    const auto x = oracle::random_gray(rng, 40, 33), y = oracle::random_gray(rng, 40, 33);
    const auto r = ssim_windowed(x, y, 8, 4);
    EXPECT_NEAR(r.global_score, r.local_map.mean(), 1e-15);
    for (Eigen::Index j = 0; j < r.local_map.rows(); ++j)
        for (Eigen::Index i = 0; i < r.local_map.cols(); ++i)
            ASSERT_NEAR(r.local_map(j, i), oracle::ssim(oracle::window(x, r.window_xs[i], r.window_ys[j], 8, 8),
                                                        oracle::window(y, r.window_xs[i], r.window_ys[j], 8, 8)),
                        1e-9);
}

TEST(SsimWindowed, OnlyWindowsOverlappingChangeDrop) {
    std::mt19937 rng(8);
    const auto x = oracle::random_gray(rng, 48, 48, 60, 200);
    const Rect block{16, 24, 8, 8};
    const auto y = with_block(x, block, 0);
    const auto r = ssim_windowed(x, y, 8, 4);
    for (Eigen::Index j = 0; j < r.local_map.rows(); ++j)
        for (Eigen::Index i = 0; i < r.local_map.cols(); ++i) {
            const Rect win{r.window_xs[i], r.window_ys[j], 8, 8};
            const bool overlaps = !win.intersect(block).empty();
            EXPECT_EQ(r.local_map(j, i) < 1.0, overlaps) << win;
        }
}

TEST(SsimWindowed, Errors) {
    const GrayImage x(10, 6);
    EXPECT_THROW(ssim_windowed(x, x, 8, 4), ParameterError);
    EXPECT_THROW(ssim_windowed(x, GrayImage(10, 7), 4, 2), ParameterError);
    EXPECT_THROW(ssim_windowed(x, x, 4, 0), ParameterError);
}

TEST(DifferenceEvidence, IdenticalImagesHaveNoBoxes) {
    std::mt19937 rng(9);
    const auto x = oracle::random_gray(rng, 64, 64);
    const auto ev = difference_evidence(ssim_windowed(x, x), 0.5);
    EXPECT_TRUE(ev.boxes.empty());
    EXPECT_EQ(ev.diff_image, GrayImage(64, 64, 0));
}

TEST(DifferenceEvidence, TamperedRegionGetsOneCoveringBox) {
    std::mt19937 rng(10);
    const auto x = oracle::random_gray(rng, 128, 96);
    const Rect tamper{40, 30, 32, 32};
    const auto y = with_block(x, tamper, 128);
    const auto ev = difference_evidence(ssim_windowed(x, y), 0.5);
    ASSERT_EQ(ev.boxes.size(), 1u);
    EXPECT_GE(ev.boxes[0].intersect(tamper).area(), tamper.area() * 9 / 10);
    EXPECT_TRUE((Rect{0, 0, 128, 96}).contains(ev.boxes[0]));
}

TEST(DifferenceEvidence, RelocatedLogoFlagsBothPositions) {
    using namespace veridoc::testing;
    const GrayImage templ(medical_page({}));
    const GrayImage forged(medical_page({600, 420, true}));
    const auto ev = difference_evidence(ssim_windowed(templ, forged), 0.5);
    ASSERT_GE(ev.boxes.size(), 2u);
    const Rect old_logo{30, 25, 90, 50}, new_logo{480, 25, 90, 50};
    int old_box = -1, new_box = -1;
    for (int i = 0; i < static_cast<int>(ev.boxes.size()); ++i) {
        if (ev.boxes[i].contains(old_logo)) old_box = i;
        if (ev.boxes[i].contains(new_logo)) new_box = i;
    }
    EXPECT_GE(old_box, 0);
    EXPECT_GE(new_box, 0);
    EXPECT_NE(old_box, new_box);
}

TEST(DrawBoxes, SinglePixelOutline) {
    const RasterImage img(10, 10, {0, 0, 0});
    const std::vector<Rect> boxes{{2, 3, 4, 5}};
    const auto out = draw_boxes(img, boxes);
    int red = 0;
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x)
            if (out(x, y, 0) == 255) {
                ++red;
                EXPECT_TRUE(x == 2 || x == 5 || y == 3 || y == 7);
            }
    EXPECT_EQ(red, 14);
}
