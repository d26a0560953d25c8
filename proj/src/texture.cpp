#include "advsmo/texture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "advsmo/error.hpp"

namespace advsmo {

namespace {

void validate(const Channel& ch, GlcmOffset offset, int levels) {
    if (levels < 2 || levels > 256) {
        throw Error(ErrorCode::invalid_levels, "levels must be in [2, 256], got " + std::to_string(levels));
    }
    if (std::abs(offset.dx) >= ch.width() || std::abs(offset.dy) >= ch.height()) {
        throw Error(ErrorCode::invalid_offset, "offset (" + std::to_string(offset.dx) + ", " +
                                                   std::to_string(offset.dy) + ") does not fit the image");
    }
}

Channel crop(const Channel& ch, int x0, int y0, int w, int h) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(w) * h);
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) values.push_back(ch.at(x, y));
    }
    return Channel(w, h, std::move(values));
}

// Tile origins covering [0, extent) with the last tile flush to the border.
std::vector<int> tile_origins(int extent, int tile, int stride) {
    std::vector<int> out;
    for (int o = 0; o + tile <= extent; o += stride) out.push_back(o);
    if (out.empty() || out.back() + tile < extent) out.push_back(std::max(0, extent - tile));
    return out;
}

}  // namespace

std::uint64_t GlcmMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

int quantize_level(double v, int levels) noexcept {
    const int q = static_cast<int>(std::floor(v * levels));
    return std::clamp(q, 0, levels - 1);
}

GlcmMatrix glcm(const Channel& ch, GlcmOffset offset, int levels) {
    validate(ch, offset, levels);
    GlcmMatrix m;
    m.levels = levels;
    m.offset = offset;
    m.counts.assign(static_cast<std::size_t>(levels) * levels, 0);

    const int x_lo = std::max(0, -offset.dx);
    const int x_hi = std::min(ch.width(), ch.width() - offset.dx);
    const int y_lo = std::max(0, -offset.dy);
    const int y_hi = std::min(ch.height(), ch.height() - offset.dy);
    for (int y = y_lo; y < y_hi; ++y) {
        for (int x = x_lo; x < x_hi; ++x) {
            const int i = quantize_level(ch.at(x, y), levels);
            const int j = quantize_level(ch.at(x + offset.dx, y + offset.dy), levels);
            ++m.counts[static_cast<std::size_t>(i) * levels + j];
        }
    }

    const auto total = m.total();
    m.normalized.assign(m.counts.size(), 0.0);
    if (total > 0) {
        for (std::size_t k = 0; k < m.counts.size(); ++k) {
            m.normalized[k] = static_cast<double>(m.counts[k]) / static_cast<double>(total);
        }
    }
    return m;
}

double texture_diff(const Channel& benign, const Channel& adv, GlcmOffset offset, int levels) {
    if (benign.width() != adv.width() || benign.height() != adv.height()) {
        throw Error(ErrorCode::dimension_mismatch, "planes differ in size");
    }
    const GlcmMatrix p = glcm(benign, offset, levels);
    const GlcmMatrix q = glcm(adv, offset, levels);
    double sum = 0.0;
    for (std::size_t k = 0; k < p.normalized.size(); ++k) {
        sum += std::abs(p.normalized[k] - q.normalized[k]);
    }
    return std::min(sum, 2.0);
}

Channel texture_heatmap(const Channel& benign, const Channel& adv, int tile, int stride, GlcmOffset offset,
                        int levels) {
    if (benign.width() != adv.width() || benign.height() != adv.height()) {
        throw Error(ErrorCode::dimension_mismatch, "planes differ in size");
    }
    if (tile < 2 || stride < 1) {
        throw Error(ErrorCode::invalid_argument, "tile must be >= 2 and stride >= 1");
    }
    const int w = benign.width();
    const int h = benign.height();
    const int tw = std::min(tile, w);
    const int th = std::min(tile, h);

    std::vector<double> sum(static_cast<std::size_t>(w) * h, 0.0);
    std::vector<int> hits(sum.size(), 0);
    for (int y0 : tile_origins(h, th, stride)) {
        for (int x0 : tile_origins(w, tw, stride)) {
            const double d = texture_diff(crop(benign, x0, y0, tw, th), crop(adv, x0, y0, tw, th), offset, levels);
            for (int y = y0; y < y0 + th; ++y) {
                for (int x = x0; x < x0 + tw; ++x) {
                    sum[static_cast<std::size_t>(y) * w + x] += d;
                    ++hits[static_cast<std::size_t>(y) * w + x];
                }
            }
        }
    }
    for (std::size_t k = 0; k < sum.size(); ++k) {
        sum[k] = std::clamp(sum[k] / (2.0 * hits[k]), 0.0, 1.0);
    }
    return Channel(w, h, std::move(sum));
}

std::string glcm_to_csv(const GlcmMatrix& m) {
    std::ostringstream out;
    for (int i = 0; i < m.levels; ++i) {
        for (int j = 0; j < m.levels; ++j) {
            if (j) out << ',';
            out << m.count(i, j);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace advsmo
