#pragma once

#include <iosfwd>

namespace proxcert {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitConfig = 2,
  kExitReference = 3,
};

/// Entry point of the proxcert command line; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace proxcert
