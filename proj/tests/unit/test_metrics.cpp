#include <gtest/gtest.h>

#include <random>

#include "advsmo/error.hpp"
#include "advsmo/metrics.hpp"
#include "support/oracles.hpp"

using namespace advsmo;

TEST(Ssim, IdenticalImagesScoreOne) {
    std::mt19937_64 rng(1);
    const Image img = oracle::random_image(rng, 16, 16, 3);
    EXPECT_NEAR(ssim(img, img).value, 1.0, 1e-9);
    const Image flat = Image::filled(8, 8, 1, 0.3);
    EXPECT_NEAR(ssim(flat, flat).value, 1.0, 1e-12);
}

TEST(Ssim, MatchesDirectSummation) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 25; ++i) {
        const Image a = oracle::random_image(rng, 16, 16, i % 2 ? 3 : 1);
        const Image b = oracle::random_image(rng, 16, 16, i % 2 ? 3 : 1);
        EXPECT_NEAR(ssim(a, b).value, oracle::ssim(a, b), 1e-6);
    }
}

TEST(Ssim, NonSquareImagesMatchOracle) {
    std::mt19937_64 rng(8);
    const Image a = oracle::random_image(rng, 19, 11, 1);
    const Image b = oracle::random_image(rng, 19, 11, 1);
    EXPECT_NEAR(ssim(a, b).value, oracle::ssim(a, b), 1e-6);
}

TEST(Ssim, ErrorsAreReported) {
    try {
        ssim(Image::filled(7, 8, 1, 0.1), Image::filled(7, 8, 1, 0.2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::too_small);
    }
    try {
        ssim(Image::filled(8, 8, 1, 0.1), Image::filled(9, 8, 1, 0.2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    }
}

TEST(Mse, KnownValues) {
    std::mt19937_64 rng(3);
    const Image a = oracle::random_image(rng, 9, 9, 3);
    EXPECT_EQ(mse(a, a).value, 0.0);
    EXPECT_EQ(mse(Image::filled(8, 8, 1, 0.0), Image::filled(8, 8, 1, 1.0)).value, 1.0);
    const Image b = oracle::random_image(rng, 9, 9, 3);
    EXPECT_NEAR(mse(a, b).value, oracle::mse(a, b), 1e-12);
}

TEST(Linf, KnownValues) {
    std::vector<double> px(64, 0.5);
    const Image a(8, 8, 1, px);
    px[13] = 0.5 + 37.0 / 255.0;
    const Image b(8, 8, 1, px);
    EXPECT_EQ(linf(a, a).value, 0.0);
    EXPECT_NEAR(linf(a, b).value, 37.0, 1e-12);

    std::mt19937_64 rng(4);
    const Image c = oracle::random_image(rng, 10, 10, 3);
    const Image d = oracle::random_image(rng, 10, 10, 3);
    EXPECT_EQ(linf(c, d).value, oracle::linf(c, d));
}

TEST(Metrics, SymmetricAndBounded) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        const Image a = oracle::random_image(rng, 12, 12, 3);
        const Image b = oracle::random_image(rng, 12, 12, 3);
        for (MetricKind k : {MetricKind::ssim, MetricKind::mse, MetricKind::linf}) {
            EXPECT_EQ(measure(k, a, b).value, measure(k, b, a).value);
        }
        EXPECT_LE(ssim(a, b).value, 1.0);
        EXPECT_GE(ssim(a, b).value, -1.0);
        EXPECT_GT(mse(a, b).value, 0.0);
        EXPECT_LE(linf(a, b).value, 255.0);
    }
}

TEST(Linf, SinglePixelWorseningNeverDecreases) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::size_t> pick(0, 63);
    Image a = oracle::random_image(rng, 8, 8, 1);
    std::vector<double> px(a.pixels().begin(), a.pixels().end());
    double prev = 0.0;
    Image b = a;
    for (int step = 0; step < 40; ++step) {
        const std::size_t i = pick(rng);
        // Move pixel i further from a's value.
        const double target = a.pixels()[i] < 0.5 ? 1.0 : 0.0;
        px[i] = px[i] + 0.25 * (target - px[i]);
        b = Image(8, 8, 1, px);
        const double now = linf(a, b).value;
        EXPECT_GE(now, prev);
        prev = now;
    }
}

TEST(Metrics, ZeroOnlyForEqualImages) {
    std::vector<double> px(64, 0.2);
    const Image a(8, 8, 1, px);
    px[63] = std::nextafter(0.2, 1.0);
    const Image b(8, 8, 1, px);
    EXPECT_GT(mse(a, b).value, 0.0);
    EXPECT_GT(linf(a, b).value, 0.0);
}

TEST(MetricKindNames, RoundTrip) {
    for (MetricKind k : {MetricKind::ssim, MetricKind::mse, MetricKind::linf}) {
        EXPECT_EQ(metric_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(metric_kind_from_string("psnr"), Error);
}
