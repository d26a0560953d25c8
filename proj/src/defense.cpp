#include "advsmo/defense.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "advsmo/error.hpp"
#include "advsmo/filter2d.hpp"

namespace advsmo {

namespace {

using detail::reflect101;

enum class Stat { min, max, mean, median };

std::vector<double> window_stat(const Channel& ch, int window, Stat stat) {
    const int w = ch.width();
    const int h = ch.height();
    const int half = window / 2;
    std::vector<double> out(static_cast<std::size_t>(w) * h);
    std::vector<double> buf(static_cast<std::size_t>(window) * window);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t k = 0;
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    buf[k++] = ch.at(reflect101(x + dx, w), reflect101(y + dy, h));
                }
            }
            double v = 0.0;
            switch (stat) {
                case Stat::min: v = *std::min_element(buf.begin(), buf.end()); break;
                case Stat::max: v = *std::max_element(buf.begin(), buf.end()); break;
                case Stat::mean: {
                    double s = 0.0;
                    for (double b : buf) s += b;
                    // Rounding can push the sum/n a few ulps past the window extremes.
                    const auto [lo, hi] = std::minmax_element(buf.begin(), buf.end());
                    v = std::clamp(s / static_cast<double>(buf.size()), *lo, *hi);
                    break;
                }
                case Stat::median: {
                    auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
                    std::nth_element(buf.begin(), mid, buf.end());
                    v = *mid;
                    break;
                }
            }
            out[static_cast<std::size_t>(y) * w + x] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

std::vector<double> gaussian(const Channel& ch, int window, double sigma) {
    if (!(sigma > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "gaussian sigma must be positive");
    }
    const int half = window / 2;
    std::vector<double> kernel(static_cast<std::size_t>(window) * window);
    double sum = 0.0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            kernel[static_cast<std::size_t>(dy + half) * window + (dx + half)] = v;
            sum += v;
        }
    }
    for (double& v : kernel) v /= sum;
    auto out = detail::convolve_plane(ch.values(), ch.width(), ch.height(), kernel, window);
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
    return out;
}

// Bilinear resample with pixel-center alignment and clamped borders.
std::vector<double> resample(std::span<const double> src, int sw, int sh, int dw, int dh) {
    std::vector<double> out(static_cast<std::size_t>(dw) * dh);
    const double sx = static_cast<double>(sw) / dw;
    const double sy = static_cast<double>(sh) / dh;
    for (int y = 0; y < dh; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(sh - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, sh - 1);
        const double ty = fy - y0;
        for (int x = 0; x < dw; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(sw - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, sw - 1);
            const double tx = fx - x0;
            const auto at = [&](int xx, int yy) { return src[static_cast<std::size_t>(yy) * sw + xx]; };
            const double top = at(x0, y0) + tx * (at(x1, y0) - at(x0, y0));
            const double bottom = at(x0, y1) + tx * (at(x1, y1) - at(x0, y1));
            out[static_cast<std::size_t>(y) * dw + x] = std::clamp(top + ty * (bottom - top), 0.0, 1.0);
        }
    }
    return out;
}

std::vector<double> bilinear(const Channel& ch) {
    const int w = ch.width();
    const int h = ch.height();
    const int dw = std::max(1, w / 2);
    const int dh = std::max(1, h / 2);
    const auto down = resample(ch.values(), w, h, dw, dh);
    return resample(down, dw, dh, w, h);
}

}  // namespace

std::string_view to_string(DefenseType t) {
    switch (t) {
        case DefenseType::bilinear: return "bilinear";
        case DefenseType::gaussian: return "gaussian";
        case DefenseType::max: return "max";
        case DefenseType::mean: return "mean";
        case DefenseType::median: return "median";
        case DefenseType::min: return "min";
    }
    return "unknown";
}

DefenseType defense_type_from_string(std::string_view name) {
    for (DefenseType t : kAllDefenses) {
        if (to_string(t) == name) return t;
    }
    throw Error(ErrorCode::invalid_argument, "unknown defense '" + std::string(name) + "'");
}

std::string DefenseKind::label() const {
    std::string s(to_string(type));
    if (type != DefenseType::bilinear) s += "-w" + std::to_string(window);
    return s;
}

Image apply_defense(const Image& img, const DefenseKind& d) {
    if (d.window < 3 || d.window % 2 == 0) {
        throw Error(ErrorCode::invalid_argument, "defense window must be odd and >= 3");
    }
    if (d.window > std::min(img.width(), img.height())) {
        throw Error(ErrorCode::window_too_large, "window " + std::to_string(d.window) + " exceeds image size");
    }
    std::vector<Channel> planes;
    planes.reserve(img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        const Channel ch = img.plane(c);
        std::vector<double> out;
        switch (d.type) {
            case DefenseType::bilinear: out = bilinear(ch); break;
            case DefenseType::gaussian: out = gaussian(ch, d.window, d.sigma); break;
            case DefenseType::max: out = window_stat(ch, d.window, Stat::max); break;
            case DefenseType::mean: out = window_stat(ch, d.window, Stat::mean); break;
            case DefenseType::median: out = window_stat(ch, d.window, Stat::median); break;
            case DefenseType::min: out = window_stat(ch, d.window, Stat::min); break;
        }
        planes.emplace_back(img.width(), img.height(), std::move(out));
    }
    return from_planes(planes);
}

}  // namespace advsmo
