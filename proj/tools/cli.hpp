#pragma once

#include <iosfwd>

namespace arcoh::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kHypothesisViolated = 2,
  kBudget = 3,
};

/// Parses argv, runs one command and writes its report to `out` (or the
/// --out file).  Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace arcoh::cli
