#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "advsmo/candidates.hpp"
#include "advsmo/error.hpp"
#include "advsmo/gabor.hpp"
#include "support/oracles.hpp"

using namespace advsmo;

namespace {

GaborParams params(int k, double theta, double lambda, double psi = 0.0, double gamma = 0.5) {
    GaborParams p;
    p.kernel_scale = k;
    p.theta = theta;
    p.wavelength = lambda;
    p.phase = psi;
    p.aspect = gamma;
    p.sigma = sigma_for_bandwidth(lambda, 1.0);
    return p;
}

double variance(const Image& img) {
    const auto px = img.pixels();
    const double mean = std::accumulate(px.begin(), px.end(), 0.0) / px.size();
    double v = 0.0;
    for (double x : px) v += (x - mean) * (x - mean);
    return v / px.size();
}

}  // namespace

TEST(RotateCoords, AnalyticCases) {
    auto [a, b] = rotate_coords(2.5, -1.5, 0.0);
    EXPECT_EQ(a, 2.5);
    EXPECT_EQ(b, -1.5);
    std::tie(a, b) = rotate_coords(1.0, 0.0, 90.0);
    EXPECT_NEAR(a, 0.0, 1e-15);
    EXPECT_NEAR(b, -1.0, 1e-15);
    std::tie(a, b) = rotate_coords(1.0, 0.0, 45.0);
    EXPECT_NEAR(a, std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_NEAR(b, -std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(RotateCoords, PreservesNorm) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> c(-10.0, 10.0), t(-720.0, 720.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = c(rng), y = c(rng);
        const auto [u, v] = rotate_coords(x, y, t(rng));
        EXPECT_NEAR(u * u + v * v, x * x + y * y, 1e-12);
    }
}

TEST(GaborParamsTest, Validation) {
    EXPECT_THROW(params(4, 0, 4).validate(), Error);
    EXPECT_THROW(params(1, 0, 4).validate(), Error);
    EXPECT_THROW(params(5, 0, 0.0).validate(), Error);
    EXPECT_THROW(params(5, 0, 4, 0, -1.0).validate(), Error);
    EXPECT_NO_THROW(params(5, 0, 4).validate());
    EXPECT_DOUBLE_EQ(normalize_theta(190.0), 10.0);
    EXPECT_DOUBLE_EQ(normalize_theta(-30.0), 150.0);
    EXPECT_DOUBLE_EQ(normalize_theta(180.0), 0.0);
}

TEST(GaborParamsTest, OneOctaveSigmaRatio) {
    // sigma / lambda = (1/pi) sqrt(ln2 / 2) * 3 at one octave.
    EXPECT_NEAR(sigma_for_bandwidth(10.0, 1.0) / 10.0, 0.5622, 1e-4);
}

TEST(GaborKernel, RawCenterIsOne) {
    const Kernel raw = gabor_kernel_raw(params(7, 30, 5));
    EXPECT_DOUBLE_EQ(raw.at(0, 0), 1.0);
}

TEST(GaborKernel, SumsToOne) {
    const Kernel k = gabor_kernel(params(9, 45, 18));
    EXPECT_NEAR(std::accumulate(k.weights.begin(), k.weights.end(), 0.0), 1.0, 1e-9);
}

TEST(GaborKernel, EvenWhenPhaseIsZero) {
    for (double theta : {0.0, 17.0, 45.0, 90.0, 133.0}) {
        const Kernel k = gabor_kernel(params(11, theta, 22));
        for (int dy = -5; dy <= 5; ++dy)
            for (int dx = -5; dx <= 5; ++dx) EXPECT_EQ(k.at(dx, dy), k.at(-dx, -dy)) << theta;
    }
}

TEST(GaborKernel, MirrorBetweenThetaAndSupplement) {
    for (double theta : {0.0, 10.0, 30.0, 60.0, 85.0}) {
        const Kernel a = gabor_kernel(params(9, theta, 18));
        const Kernel b = gabor_kernel(params(9, 180.0 - theta, 18));
        for (int dy = -4; dy <= 4; ++dy)
            for (int dx = -4; dx <= 4; ++dx) EXPECT_NEAR(a.at(dx, dy), b.at(-dx, dy), 1e-12);
    }
}

TEST(GaborKernel, EnvelopeLimitIsTransposeSymmetric) {
    const Kernel k = gabor_kernel(params(9, 0, 1e6, 0.0, 1.0));
    for (int dy = -4; dy <= 4; ++dy)
        for (int dx = -4; dx <= 4; ++dx) EXPECT_NEAR(k.at(dx, dy), k.at(dy, dx), 1e-9);
}

TEST(GaborKernel, DegenerateSumIsRejected) {
    // lambda = k/2 puts two carrier periods across the kernel; some orientations sum below zero.
    bool saw_degenerate = false;
    for (int theta = 0; theta <= 90; theta += 5) {
        try {
            gabor_kernel(params(15, theta, 7.5));
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::degenerate_kernel);
            saw_degenerate = true;
        }
    }
    EXPECT_TRUE(saw_degenerate);
}

TEST(GaborKernel, DefaultGridIsWellConditioned) {
    const GaborDefaults defaults;
    for (const auto& p : generate_grid(GridSpec{})) {
        const Kernel k = gabor_kernel(defaults.params_for(p.k1, p.theta));
        EXPECT_NEAR(std::accumulate(k.weights.begin(), k.weights.end(), 0.0), 1.0, 1e-9);
    }
}

TEST(Smooth, ConstantImageIsFixedPoint) {
    const Image img = Image::filled(16, 16, 3, 0.37);
    const Image out = smooth(img, params(7, 30, 14));
    for (double v : out.pixels()) EXPECT_NEAR(v, 0.37, 1e-12);
}

TEST(Smooth, ImpulseReproducesKernel) {
    const int n = 21;
    std::vector<double> px(n * n, 0.0);
    px[10 * n + 10] = 1.0;
    const GaborParams p = params(7, 30, 5, 0.4);
    const Image out = smooth(Image(n, n, 1, px), p);
    const Kernel k = gabor_kernel(p);
    for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -3; dx <= 3; ++dx)
            EXPECT_NEAR(out.at(10 + dx, 10 + dy), std::clamp(k.at(dx, dy), 0.0, 1.0), 1e-15);
}

TEST(Smooth, ReducesStripeVariance) {
    // Vertical stripes with period 4 (intensity varies along x).
    const Image stripes = oracle::stripe_image(32, 32, 4.0, 0.0);
    const Image out = smooth(stripes, params(9, 90, 4));
    EXPECT_LT(variance(out), variance(stripes));
}

TEST(Smooth, KernelLargerThanImage) {
    try {
        smooth(Image::filled(8, 8, 1, 0.5), params(9, 0, 18));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kernel_larger_than_image);
    }
}

TEST(Smooth, LinearWhenNoClampingOccurs) {
    // Low-contrast stripes around mid-gray stay far from the clamp bounds.
    const Image base = oracle::stripe_image(24, 24, 7.0, 20.0, 0.3, 0.05);
    const GaborParams p = params(5, 45, 10);
    const Image full = smooth(base, p);
    for (double a : {0.25, 0.5, 0.9}) {
        std::vector<double> px(base.pixels().begin(), base.pixels().end());
        for (double& v : px) v *= a;
        const Image scaled = smooth(Image(24, 24, 1, px), p);
        for (std::size_t i = 0; i < px.size(); ++i) EXPECT_NEAR(scaled.pixels()[i], a * full.pixels()[i], 1e-9);
    }
}

TEST(Smooth, OutputInRangeAndShapePreserved) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 10; ++i) {
        const Image img = oracle::random_image(rng, 16, 12, 3);
        const Image out = smooth(img, params(5, i * 17.0, 10.0));
        EXPECT_TRUE(out.same_shape(img));
        for (double v : out.pixels()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(ExtractTexture, IdenticalInputsGiveHalfPlane) {
    const Image img = oracle::stripe_image(16, 16, 5.0, 30.0);
    const Image residual = extract_texture(img, img);
    for (double v : residual.pixels()) EXPECT_EQ(v, 0.5);
}

TEST(ExtractTexture, ResidualReconstructsBenign) {
    const Image benign = oracle::stripe_image(32, 32, 6.0, 70.0);
    const Image smoothed = smooth(benign, GaborDefaults{}.params_for(9, 70.0));
    const Image residual = extract_texture(benign, smoothed);
    const Image back = reconstruct_benign(smoothed, residual);
    for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back.pixels()[i], benign.pixels()[i], 1e-9);

    double var = 0.0;
    for (double r : residual.pixels()) var += (r - 0.5) * (r - 0.5);
    EXPECT_GT(var, 0.0);
}

TEST(ExtractTexture, DimensionMismatch) {
    try {
        extract_texture(Image::filled(8, 8, 1, 0.5), Image::filled(8, 9, 1, 0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    }
}
