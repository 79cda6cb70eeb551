#pragma once

#include <iosfwd>

namespace cubeseek::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;      // usage, validation or data error
inline constexpr int kExitTruncated = 2;  // solver hit --max-iterations

/// Entry point for the `cubeseek` tool: solve, bench, fit, distance and report subcommands.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cubeseek::cli
