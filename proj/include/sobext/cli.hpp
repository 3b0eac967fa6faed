#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sobext::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics and the resolved configuration to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sobext::cli
