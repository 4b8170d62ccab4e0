#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;      // I/O errors, existing/missing store
inline constexpr int kUsage = 2;        // bad flags, malformed path or time
inline constexpr int kNotResolved = 3;  // NotYetExisting, NoPredecessor, NoSuccessor

/// Runs one `stc` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stc::cli
