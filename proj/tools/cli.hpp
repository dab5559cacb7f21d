#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tplcov::cli {

enum ExitCode : int { kOk = 0, kDataError = 2, kNumericError = 3, kUsage = 64 };

// Runs one command line (without the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tplcov::cli
