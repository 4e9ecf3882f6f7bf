#pragma once

#include <ostream>

namespace codesim {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O, input program and corpus errors
inline constexpr int kExitUsage = 2;

/// Parses the command line and runs one subcommand. Results go to `out`,
/// diagnostics to `err` as a single line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace codesim
