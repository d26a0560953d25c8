#include <gtest/gtest.h>

#include <random>

#include "advsmo/error.hpp"
#include "advsmo/texture.hpp"
#include "support/oracles.hpp"

using namespace advsmo;

namespace {

Channel checkerboard(int n) {
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) v[static_cast<std::size_t>(y) * n + x] = (x + y) % 2 ? 1.0 : 0.0;
    return Channel(n, n, std::move(v));
}

}  // namespace

TEST(Glcm, TwoByTwoFixture) {
    const Channel ch(2, 2, {0.0, 0.0, 1.0, 1.0});
    const GlcmMatrix m = glcm(ch, {1, 0}, 2);
    EXPECT_EQ(m.counts, (std::vector<std::uint64_t>{1, 0, 0, 1}));
}

TEST(Glcm, CheckerboardFixture) {
    const GlcmMatrix m = glcm(checkerboard(4), {1, 0}, 2);
    EXPECT_EQ(m.counts, (std::vector<std::uint64_t>{0, 6, 6, 0}));
}

TEST(Glcm, ConstantImageHasOneCell) {
    const Channel ch(5, 4, std::vector<double>(20, 0.6));
    const GlcmMatrix m = glcm(ch, {1, 1}, 8);
    const int q = quantize_level(0.6, 8);
    EXPECT_EQ(q, 4);
    EXPECT_EQ(m.count(q, q), m.total());
    EXPECT_EQ(m.total(), 12u);
    EXPECT_DOUBLE_EQ(m.prob(q, q), 1.0);
}

TEST(Glcm, MatchesPairEnumeration) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> side(2, 8), levels(2, 16);
    for (int i = 0; i < 40; ++i) {
        const int w = side(rng), h = side(rng);
        const Channel ch = oracle::random_channel(rng, w, h);
        std::uniform_int_distribution<int> ox(-(w - 1), w - 1), oy(-(h - 1), h - 1);
        const int dx = ox(rng), dy = oy(rng), l = levels(rng);
        EXPECT_EQ(glcm(ch, {dx, dy}, l).counts, oracle::glcm_counts(ch, dx, dy, l));
    }
}

TEST(Glcm, NegatedOffsetGivesTranspose) {
    std::mt19937_64 rng(22);
    const Channel ch = oracle::random_channel(rng, 7, 6);
    const GlcmMatrix a = glcm(ch, {2, -1}, 5);
    const GlcmMatrix b = glcm(ch, {-2, 1}, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) EXPECT_EQ(a.count(i, j), b.count(j, i));
}

TEST(Glcm, NormalizedIsDistribution) {
    std::mt19937_64 rng(23);
    const GlcmMatrix m = glcm(oracle::random_channel(rng, 8, 8), {0, 1}, 8);
    double sum = 0.0;
    for (double p : m.normalized) {
        EXPECT_GE(p, 0.0);
        sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Glcm, InvalidArguments) {
    const Channel ch(4, 4, std::vector<double>(16, 0.1));
    try {
        glcm(ch, {4, 0}, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_offset);
    }
    try {
        glcm(ch, {1, 0}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_levels);
    }
    EXPECT_THROW(glcm(ch, {1, 0}, 257), Error);
}

TEST(TextureDiff, Fixtures) {
    const Channel flat(4, 4, std::vector<double>(16, 0.0));
    EXPECT_EQ(texture_diff(flat, flat, {1, 0}, 2), 0.0);
    EXPECT_DOUBLE_EQ(texture_diff(flat, checkerboard(4), {1, 0}, 2), 2.0);
}

TEST(TextureDiff, BoundedAndSymmetric) {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 30; ++i) {
        const Channel a = oracle::random_channel(rng, 8, 8);
        const Channel b = oracle::random_channel(rng, 8, 8);
        const double d = texture_diff(a, b);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 2.0);
        EXPECT_EQ(d, texture_diff(b, a));
    }
    EXPECT_THROW(texture_diff(Channel(4, 4, std::vector<double>(16, 0.0)), Channel(4, 5, std::vector<double>(20, 0.0))),
                 Error);
}

TEST(TextureHeatmap, ZeroForIdenticalAndInRange) {
    std::mt19937_64 rng(25);
    const Channel a = oracle::random_channel(rng, 20, 16);
    const Channel b = oracle::random_channel(rng, 20, 16);
    const Channel same = texture_heatmap(a, a);
    for (double v : same.values()) EXPECT_EQ(v, 0.0);
    const Channel map = texture_heatmap(a, b);
    EXPECT_EQ(map.width(), 20);
    EXPECT_EQ(map.height(), 16);
    for (double v : map.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(GlcmCsv, RowsAndColumns) {
    EXPECT_EQ(glcm_to_csv(glcm(checkerboard(4), {1, 0}, 2)), "0,6\n6,0\n");
}
