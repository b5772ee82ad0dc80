#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xplab::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // usage, input or IO error
inline constexpr int kExitCheckFailed = 2; // an asserted check failed; report still written

/// Runs one command line (without the program name). The report goes to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace xplab::cli
