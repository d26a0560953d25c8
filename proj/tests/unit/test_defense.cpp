#include <gtest/gtest.h>

#include <algorithm>

#include "advsmo/defense.hpp"
#include "advsmo/error.hpp"
#include "support/oracles.hpp"

using namespace advsmo;

namespace {

DefenseKind kind(DefenseType t, int window = 3) { return DefenseKind{t, window, 1.0}; }

}  // namespace

TEST(Defense, ConstantImageIsAFixedPoint) {
    const Image c = Image::filled(12, 10, 3, 0.37);
    for (DefenseType t : kAllDefenses) {
        const Image out = apply_defense(c, kind(t));
        ASSERT_TRUE(out.same_shape(c));
        for (double v : out.pixels()) EXPECT_NEAR(v, 0.37, 1e-12) << to_string(t);
    }
}

TEST(Defense, OrderingOfRankFilters) {
    const Image img = oracle::random_image(16, 16, 3, 61);
    for (int w : {3, 5}) {
        const Image mn = apply_defense(img, kind(DefenseType::min, w));
        const Image mean = apply_defense(img, kind(DefenseType::mean, w));
        const Image med = apply_defense(img, kind(DefenseType::median, w));
        const Image mx = apply_defense(img, kind(DefenseType::max, w));
        for (std::size_t i = 0; i < img.pixels().size(); ++i) {
            EXPECT_LE(mn.pixels()[i], mean.pixels()[i]);
            EXPECT_LE(mean.pixels()[i], mx.pixels()[i]);
            EXPECT_LE(mn.pixels()[i], med.pixels()[i]);
            EXPECT_LE(med.pixels()[i], mx.pixels()[i]);
        }
    }
}

TEST(Defense, MedianRemovesIsolatedSalt) {
    std::vector<double> px(64, 0.25);
    px[9] = 1.0;
    px[45] = 1.0;
    const Image out = apply_defense(Image(8, 8, 1, px), kind(DefenseType::median));
    for (double v : out.pixels()) EXPECT_EQ(v, 0.25);
}

TEST(Defense, WindowValues) {
    std::vector<double> px(25, 0.0);
    px[12] = 0.9;  // center of a 5x5 image
    const Image img(5, 5, 1, px);
    EXPECT_EQ(apply_defense(img, kind(DefenseType::max)).at(1, 1, 0), 0.9);
    EXPECT_EQ(apply_defense(img, kind(DefenseType::max)).at(0, 0, 0), 0.0);
    EXPECT_EQ(apply_defense(img, kind(DefenseType::min)).at(2, 2, 0), 0.0);
    EXPECT_NEAR(apply_defense(img, kind(DefenseType::mean)).at(1, 2, 0), 0.1, 1e-12);
    const Image g = apply_defense(img, kind(DefenseType::gaussian));
    EXPECT_GT(g.at(2, 2, 0), g.at(1, 2, 0));
    EXPECT_GT(g.at(1, 2, 0), g.at(1, 1, 0));
    EXPECT_LT(g.at(2, 2, 0), 0.9);
}

TEST(Defense, BilinearKeepsShapeAndRange) {
    const Image img = oracle::random_image(9, 7, 3, 62);
    const Image out = apply_defense(img, kind(DefenseType::bilinear));
    ASSERT_TRUE(out.same_shape(img));
    for (double v : out.pixels()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    for (double v : out.pixels()) {
        EXPECT_GE(v, *lo - 1e-12);
        EXPECT_LE(v, *hi + 1e-12);
    }
}

TEST(Defense, Errors) {
    const Image img = Image::filled(4, 4, 1, 0.5);
    for (int w : {2, 1, 0, -3}) EXPECT_THROW(apply_defense(img, kind(DefenseType::median, w)), Error);
    try {
        apply_defense(img, kind(DefenseType::median, 5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::window_too_large);
    }
    EXPECT_EQ(defense_type_from_string("median"), DefenseType::median);
    EXPECT_THROW(defense_type_from_string("blur"), Error);
}
