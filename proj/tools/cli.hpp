#pragma once

// paretotool front end. runCli is the whole program minus process setup, so
// tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace pareto::cli {

enum ExitCode : int {
  kPass = 0,
  kCertificateFailed = 1,
  kInputError = 2,
  kNumericalFailure = 3,
};

/// args excludes the program name.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pareto::cli
