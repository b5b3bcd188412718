#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdm::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

// Runs the command line `args` (args[0] is the program name). Regular output
// goes to `out` unless --output redirects it; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdm::cli
