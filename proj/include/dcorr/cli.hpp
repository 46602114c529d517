#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dcorr::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1, // computation or verification failure
    usage = 2,
    data = 3,
};

inline constexpr int schema_version = 1;

/// Runs the command line `args` (args[0] is the program name). Machine
/// output goes to `out`; logs and the one-line error reason go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dcorr::cli
