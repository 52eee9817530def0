#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optidesign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Machine-readable output
/// goes to `out` unless --out names a file; summaries and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optidesign::cli
