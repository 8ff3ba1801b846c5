#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rssloc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalidInput = 2;

/// Runs one invocation. `args` excludes the program name. Results go to `out`
/// (or the --out file); errors are written to `err` as
/// {"error": {"kind": ..., "message": ...}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rssloc::cli
