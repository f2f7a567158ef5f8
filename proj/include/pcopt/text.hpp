#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pcopt::text {

/// Shortest representation that parses back to the identical double.
std::string format_double(double v);

double parse_double(std::string_view token);
long long parse_int(std::string_view token);

/// Splits on any run of the given delimiters; empty fields are dropped.
std::vector<std::string_view> split(std::string_view line, std::string_view delims = " \t");

}  // namespace pcopt::text
