#pragma once

namespace advsmo::cli {

/// Exit codes: 0 success, 1 usage or config error, 2 runtime failure.
int run_command(int argc, const char* const* argv);

}  // namespace advsmo::cli
