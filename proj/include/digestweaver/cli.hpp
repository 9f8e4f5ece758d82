#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace digestweaver::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitIo = 2;

/// Runs the command line `args` (args[0] is the program name). Output goes
/// to `out`, diagnostics and reports to `err`. Returns the exit code:
/// 0 success, 1 input error, 2 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace digestweaver::cli
