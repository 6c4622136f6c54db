#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace greedcert {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // certificate fails, guarantee violated, tie not found
inline constexpr int kExitUsage = 2;        // bad flags, unreadable or unwritable files

/// `args` excludes the program name. Results go to --out files or `out`;
/// diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

} // namespace greedcert
