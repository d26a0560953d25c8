#include "advsmo/filter2d.hpp"

namespace advsmo::detail {

std::vector<double> convolve_plane(std::span<const double> plane, int width, int height,
                                    std::span<const double> kernel, int side) {
    const int half = (side - 1) / 2;
    std::vector<double> out(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int dy = -half; dy <= half; ++dy) {
                const int sy = reflect101(y - dy, height);
                const double* row = plane.data() + static_cast<std::size_t>(sy) * width;
                const double* krow = kernel.data() + static_cast<std::size_t>(dy + half) * side + half;
                for (int dx = -half; dx <= half; ++dx) {
                    acc += krow[dx] * row[reflect101(x - dx, width)];
                }
            }
            out[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
    return out;
}

}  // namespace advsmo::detail
