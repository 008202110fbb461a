#pragma once

#include <iosfwd>

namespace bcross {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitCondition = 2,
    kExitUsage = 64,
};

/// Entry point behind the bcross executable. Reports go to `out`,
/// diagnostics and usage text to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcross
