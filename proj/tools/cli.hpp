#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blochlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerificationFailed = 2;

/// Runs one command line (args[0] is the program name). Artifacts go to the
/// --out path; without it the JSON document is written to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blochlab::cli
