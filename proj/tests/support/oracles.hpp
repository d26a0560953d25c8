#pragma once

// Independent reference implementations used only by tests. They recompute
// everything from first principles with plain loops and share no code paths
// with the library beyond the Image/Channel containers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "advsmo/image.hpp"

namespace advsmo::oracle {

inline Image random_image(std::mt19937_64& rng, int w, int h, int channels) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(static_cast<std::size_t>(w) * h * channels);
    for (double& v : px) v = u(rng);
    return Image(w, h, channels, std::move(px));
}

inline Image random_image(int w, int h, int channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_image(rng, w, h, channels);
}

inline Channel random_channel(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (double& x : v) x = u(rng);
    return Channel(w, h, std::move(v));
}

/// Sinusoidal stripes: 0.5 + amplitude * sin(2 pi (x cos a + y sin a) / period + phase).
inline Image stripe_image(int w, int h, double period, double angle_deg, double phase = 0.0,
                          double amplitude = 0.3) {
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    const double a = angle_deg * std::numbers::pi / 180.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double t = (x * std::cos(a) + y * std::sin(a)) / period;
            px[static_cast<std::size_t>(y) * w + x] = 0.5 + amplitude * std::sin(2.0 * std::numbers::pi * t + phase);
        }
    }
    return Image(w, h, 1, std::move(px));
}

inline double luma_at(const Image& img, int x, int y) {
    if (img.channels() == 1) return img.at(x, y);
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
}

/// SSIM by direct summation over every 8x8 window, two-pass statistics.
inline double ssim(const Image& a, const Image& b) {
    const int n = 8;
    const double c1 = 1e-4, c2 = 9e-4;
    double total = 0.0;
    int windows = 0;
    for (int y0 = 0; y0 + n <= a.height(); ++y0) {
        for (int x0 = 0; x0 + n <= a.width(); ++x0) {
            double ma = 0, mb = 0;
            for (int y = y0; y < y0 + n; ++y)
                for (int x = x0; x < x0 + n; ++x) {
                    ma += luma_at(a, x, y);
                    mb += luma_at(b, x, y);
                }
            ma /= n * n;
            mb /= n * n;
            double va = 0, vb = 0, cov = 0;
            for (int y = y0; y < y0 + n; ++y)
                for (int x = x0; x < x0 + n; ++x) {
                    const double da = luma_at(a, x, y) - ma;
                    const double db = luma_at(b, x, y) - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va /= n * n;
            vb /= n * n;
            cov /= n * n;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++windows;
        }
    }
    return total / windows;
}

inline double mse(const Image& a, const Image& b) {
    double s = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            for (int c = 0; c < a.channels(); ++c) {
                const double d = a.at(x, y, c) - b.at(x, y, c);
                s += d * d;
            }
    return s / (static_cast<double>(a.width()) * a.height() * a.channels());
}

inline double linf(const Image& a, const Image& b) {
    double m = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            for (int c = 0; c < a.channels(); ++c) m = std::max(m, std::abs(a.at(x, y, c) - b.at(x, y, c)));
    return m * 255.0;
}

/// Co-occurrence counts by enumerating every ordered pixel pair.
inline std::vector<std::uint64_t> glcm_counts(const Channel& ch, int dx, int dy, int levels) {
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(levels) * levels, 0);
    const auto q = [&](double v) { return std::min(levels - 1, static_cast<int>(std::floor(v * levels))); };
    for (int y1 = 0; y1 < ch.height(); ++y1)
        for (int x1 = 0; x1 < ch.width(); ++x1)
            for (int y2 = 0; y2 < ch.height(); ++y2)
                for (int x2 = 0; x2 < ch.width(); ++x2)
                    if (x2 - x1 == dx && y2 - y1 == dy) ++counts[q(ch.at(x1, y1)) * levels + q(ch.at(x2, y2))];
    return counts;
}

}  // namespace advsmo::oracle
