#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridjam {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line (`args[0]` is the program name).  Returns the
/// process exit code: 2 on parse/validation errors, 1 on an internal
/// invariant failure, 0 otherwise.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridjam
