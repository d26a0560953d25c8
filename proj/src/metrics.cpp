#include "advsmo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "advsmo/error.hpp"

namespace advsmo {

namespace {

void require_same_shape(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCode::dimension_mismatch, "images differ in width, height or channel count");
    }
}

// Summed-area table with one row/column of zero padding.
std::vector<double> integral(int w, int h, auto&& value) {
    std::vector<double> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += value(x, y);
            sat[static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1)] =
                sat[static_cast<std::size_t>(y) * (w + 1) + (x + 1)] + row;
        }
    }
    return sat;
}

double box_sum(const std::vector<double>& sat, int stride, int x, int y, int n) {
    const auto at = [&](int xx, int yy) { return sat[static_cast<std::size_t>(yy) * stride + xx]; };
    return at(x + n, y + n) - at(x, y + n) - at(x + n, y) + at(x, y);
}

}  // namespace

std::string_view to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::ssim: return "ssim";
        case MetricKind::mse: return "mse";
        case MetricKind::linf: return "linf";
    }
    return "unknown";
}

MetricKind metric_kind_from_string(std::string_view name) {
    if (name == "ssim" || name == "SSIM") return MetricKind::ssim;
    if (name == "mse" || name == "MSE") return MetricKind::mse;
    if (name == "linf" || name == "LINF") return MetricKind::linf;
    throw Error(ErrorCode::invalid_argument, "unknown metric '" + std::string(name) + "'");
}

double ssim_luma(const Channel& a, const Channel& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorCode::dimension_mismatch, "planes differ in size");
    }
    const int w = a.width();
    const int h = a.height();
    if (w < kSsimWindow || h < kSsimWindow) {
        throw Error(ErrorCode::too_small, "SSIM needs at least 8x8 pixels");
    }

    // Box sums over the window come from integral images; row-major window order.
    const auto sa = integral(w, h, [&](int x, int y) { return a.at(x, y); });
    const auto sb = integral(w, h, [&](int x, int y) { return b.at(x, y); });
    const auto saa = integral(w, h, [&](int x, int y) { return a.at(x, y) * a.at(x, y); });
    const auto sbb = integral(w, h, [&](int x, int y) { return b.at(x, y) * b.at(x, y); });
    const auto sab = integral(w, h, [&](int x, int y) { return a.at(x, y) * b.at(x, y); });

    constexpr double n = kSsimWindow * kSsimWindow;
    double total = 0.0;
    for (int y = 0; y + kSsimWindow <= h; ++y) {
        for (int x = 0; x + kSsimWindow <= w; ++x) {
            const double mu_a = box_sum(sa, w + 1, x, y, kSsimWindow) / n;
            const double mu_b = box_sum(sb, w + 1, x, y, kSsimWindow) / n;
            const double var_a = std::max(0.0, box_sum(saa, w + 1, x, y, kSsimWindow) / n - mu_a * mu_a);
            const double var_b = std::max(0.0, box_sum(sbb, w + 1, x, y, kSsimWindow) / n - mu_b * mu_b);
            const double cov = box_sum(sab, w + 1, x, y, kSsimWindow) / n - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2);
            total += num / den;
        }
    }
    const double windows = static_cast<double>(w - kSsimWindow + 1) * (h - kSsimWindow + 1);
    return std::clamp(total / windows, -1.0, 1.0);
}

MetricValue ssim(const Image& a, const Image& b) {
    require_same_shape(a, b);
    if (a == b) {
        if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
            throw Error(ErrorCode::too_small, "SSIM needs at least 8x8 pixels");
        }
        return {MetricKind::ssim, 1.0};
    }
    return {MetricKind::ssim, ssim_luma(to_luma(a), to_luma(b))};
}

MetricValue mse(const Image& a, const Image& b) {
    require_same_shape(a, b);
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = pa[i] - pb[i];
        sum += d * d;
    }
    return {MetricKind::mse, sum / static_cast<double>(pa.size())};
}

MetricValue linf(const Image& a, const Image& b) {
    require_same_shape(a, b);
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    double worst = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        worst = std::max(worst, std::abs(pa[i] - pb[i]));
    }
    return {MetricKind::linf, worst * 255.0};
}

MetricValue measure(MetricKind kind, const Image& a, const Image& b) {
    switch (kind) {
        case MetricKind::ssim: return ssim(a, b);
        case MetricKind::mse: return mse(a, b);
        case MetricKind::linf: return linf(a, b);
    }
    throw Error(ErrorCode::invalid_argument, "unknown metric kind");
}

}  // namespace advsmo
