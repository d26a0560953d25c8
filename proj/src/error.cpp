#include "advsmo/error.hpp"

namespace advsmo {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::file_missing: return "file-missing";
        case ErrorCode::unsupported_bit_depth: return "unsupported-bit-depth";
        case ErrorCode::corrupt_file: return "corrupt-file";
        case ErrorCode::io_failure: return "io-failure";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::dimension_mismatch: return "dimension-mismatch";
        case ErrorCode::too_small: return "too-small";
        case ErrorCode::kernel_larger_than_image: return "kernel-larger-than-image";
        case ErrorCode::degenerate_kernel: return "degenerate-kernel";
        case ErrorCode::invalid_offset: return "invalid-offset";
        case ErrorCode::invalid_levels: return "invalid-levels";
        case ErrorCode::empty_range: return "empty-range";
        case ErrorCode::empty_set: return "empty-set";
        case ErrorCode::degenerate_range: return "degenerate-range";
        case ErrorCode::empty_dataset: return "empty-dataset";
        case ErrorCode::empty_grid: return "empty-grid";
        case ErrorCode::window_too_large: return "window-too-large";
        case ErrorCode::network_timeout: return "network-timeout";
        case ErrorCode::malformed_response: return "malformed-response";
        case ErrorCode::http_error: return "http-error";
        case ErrorCode::all_samples_unevaluated: return "all-samples-unevaluated";
        case ErrorCode::config_invalid: return "config-invalid";
    }
    return "unknown";
}

}  // namespace advsmo
