#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace focalctx {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics and logs to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace focalctx
