#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace veridoc::cli {

/// Exit code for usage and I/O failures; verdict codes come from verdict_exit_code().
inline constexpr int kOperationalError = 1;

/// Runs one command line (args[0] is the program name) and returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace veridoc::cli
