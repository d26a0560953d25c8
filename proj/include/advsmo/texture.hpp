#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advsmo/image.hpp"

namespace advsmo {

struct GlcmOffset {
    int dx = 1;
    int dy = 0;
};

/// Gray-level co-occurrence matrix, not symmetrized. counts[i * levels + j] counts
/// pixel pairs (p, p + offset) whose quantized levels are (i, j).
struct GlcmMatrix {
    int levels = 0;
    GlcmOffset offset;
    std::vector<std::uint64_t> counts;
    std::vector<double> normalized;

    std::uint64_t count(int i, int j) const { return counts[static_cast<std::size_t>(i) * levels + j]; }
    double prob(int i, int j) const { return normalized[static_cast<std::size_t>(i) * levels + j]; }
    std::uint64_t total() const;
};

/// floor(v * levels), clamped to levels - 1.
int quantize_level(double v, int levels) noexcept;

GlcmMatrix glcm(const Channel& ch, GlcmOffset offset = {}, int levels = 8);

/// L1 distance between the normalized GLCMs of two same-sized planes, in [0, 2].
double texture_diff(const Channel& benign, const Channel& adv, GlcmOffset offset = {}, int levels = 8);

/// Sliding-tile texture change map, same size as the inputs. Each pixel holds the
/// mean texture_diff / 2 over tiles covering it, so values are in [0, 1].
Channel texture_heatmap(const Channel& benign, const Channel& adv, int tile = 8, int stride = 4,
                        GlcmOffset offset = {}, int levels = 8);

/// Row-major CSV of the raw counts, one matrix row per line.
std::string glcm_to_csv(const GlcmMatrix& m);

}  // namespace advsmo
