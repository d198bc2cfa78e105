#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mertens::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kNumericalFailure = 2,
  kVerificationFailure = 3,
};

/// Entry point behind the `mertens` executable; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mertens::cli
