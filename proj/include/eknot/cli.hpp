#pragma once

#include <iosfwd>

namespace eknot {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitIo = 2 };

/// Entry point of `eknot`. Writes results to `out` (unless a file is
/// given) and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eknot
