#pragma once

#include <string_view>

#include "advsmo/image.hpp"

namespace advsmo {

enum class MetricKind { ssim, mse, linf };

std::string_view to_string(MetricKind kind);
MetricKind metric_kind_from_string(std::string_view name);

/// A distance between two images. SSIM and MSE are on the unit scale, LINF on 0-255.
struct MetricValue {
    MetricKind kind;
    double value;
};

inline constexpr int kSsimWindow = 8;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// Mean SSIM over every 8x8 window (stride 1) of the luma planes.
MetricValue ssim(const Image& a, const Image& b);

/// SSIM map-mean on two planes directly.
double ssim_luma(const Channel& a, const Channel& b);

MetricValue mse(const Image& a, const Image& b);

/// Largest absolute pixel difference, reported on the 0-255 scale.
MetricValue linf(const Image& a, const Image& b);

MetricValue measure(MetricKind kind, const Image& a, const Image& b);

}  // namespace advsmo
