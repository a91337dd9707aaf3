#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sig::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kInputError = 3,
    kVerifyFailed = 4,
};

/// Runs one `sig` invocation. `args` excludes the program name. Machine
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sig::cli
