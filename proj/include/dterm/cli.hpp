#pragma once

#include <iosfwd>

namespace dterm {

/// Process exit statuses of the dterm tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitExhausted = 4,  // iteration budget ran out before every agent terminated
  kExitCheckFailed = 5,
  kExitNotFound = 6,  // find-tight budget exhausted
  kExitIo = 7,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dterm
