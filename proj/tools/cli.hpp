#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lmbreak::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3 };

/// Runs the command line `args` (without the program name), writing reports
/// to `out` and diagnostics to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lmbreak::cli
