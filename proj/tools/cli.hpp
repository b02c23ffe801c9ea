#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hornforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;      // runtime failure, verify divergence
inline constexpr int kExitInputError = 2;   // unreadable or malformed input
inline constexpr int kExitUsage = 64;       // bad flags

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hornforge::cli
