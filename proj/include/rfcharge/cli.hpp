#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfcharge {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRuntime = 2 };

/// Entry point of the `rfcharge` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_value_list(const std::string& text);

}  // namespace rfcharge
