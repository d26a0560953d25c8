#pragma once

#include <string>
#include <string_view>

#include "advsmo/image.hpp"

namespace advsmo {

enum class DefenseType { bilinear, gaussian, max, mean, median, min };

std::string_view to_string(DefenseType t);
DefenseType defense_type_from_string(std::string_view name);

/// An input-purification filter. `window` is odd; `sigma` applies to gaussian only.
struct DefenseKind {
    DefenseType type = DefenseType::median;
    int window = 3;
    double sigma = 1.0;

    std::string label() const;
};

inline constexpr DefenseType kAllDefenses[] = {DefenseType::bilinear, DefenseType::gaussian, DefenseType::max,
                                               DefenseType::mean,     DefenseType::median,   DefenseType::min};

/// Per-channel filtering with reflect borders. Bilinear is a 2x down / 2x up resample.
Image apply_defense(const Image& img, const DefenseKind& d);

}  // namespace advsmo
