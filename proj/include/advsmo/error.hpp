#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace advsmo {

enum class ErrorCode {
    file_missing,
    unsupported_bit_depth,
    corrupt_file,
    io_failure,
    invalid_argument,
    dimension_mismatch,
    too_small,
    kernel_larger_than_image,
    degenerate_kernel,
    invalid_offset,
    invalid_levels,
    empty_range,
    empty_set,
    degenerate_range,
    empty_dataset,
    empty_grid,
    window_too_large,
    network_timeout,
    malformed_response,
    http_error,
    all_samples_unevaluated,
    config_invalid,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace advsmo
