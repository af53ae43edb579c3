#pragma once

#include <iosfwd>

namespace din {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvalid = 2,  // model parse or config/document validation
  kExitIo = 3,
};

/// Entry point of the `din` tool. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace din
