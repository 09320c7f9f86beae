#pragma once

#include <string>
#include <vector>

namespace rfcharge {

/// Shortest round-trip decimal representation, independent of locale.
std::string format_double(double value);

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

std::string trim(const std::string& s);

}  // namespace rfcharge
