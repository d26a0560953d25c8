#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace advsmo::detail {

/// Reflect-101 border index (edge pixel not repeated). Valid while |overhang| < n.
inline int reflect101(int i, int n) noexcept {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

/// Convolves one plane with a square kernel under reflect-101 borders. No clamping.
std::vector<double> convolve_plane(std::span<const double> plane, int width, int height,
                                    std::span<const double> kernel, int side);

}  // namespace advsmo::detail
