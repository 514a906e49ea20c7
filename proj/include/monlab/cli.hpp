#pragma once

// The `monlab` command line: bench, fit, derive, simulate and report.

#include <iosfwd>
#include <string>
#include <vector>

namespace monlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitAbort = 3;

/// Runs one command. `args` excludes the program name. Never throws; every
/// failure maps to an exit code with a message on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monlab::cli
