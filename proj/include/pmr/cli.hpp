#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pmr::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kDomainError = 3,
  kNumericalError = 4,
};

/// Entry point of the `pmr` tool. args[0] is the program name. Failures are
/// reported on `err` as a single line `ERROR <code>: <detail>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker cap from PARABOLIC_MR_THREADS (unset or 0 = automatic).
unsigned worker_threads();

}  // namespace pmr::cli
