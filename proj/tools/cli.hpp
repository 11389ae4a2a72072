#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hadamard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the front end on argv-style arguments (args[0] is the program name).
/// Returns the process exit code; nothing is written outside `out`, `err`
/// and the artifact paths named in the config or flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hadamard::cli
