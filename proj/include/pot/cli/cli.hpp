#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `pot` subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on a domain error, 2 on a usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pot::cli
