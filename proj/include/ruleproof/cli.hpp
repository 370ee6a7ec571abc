#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ruleproof {

/// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Runs one subcommand. `args` excludes the program name. Inputs default to
/// `in` and outputs to `out` when no path is given; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace ruleproof
