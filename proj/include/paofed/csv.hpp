#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace paofed::csv {

/// Shortest round-trip decimal form, always with '.' as separator.
std::string format_double(double value);

double parse_double(std::string_view text);

std::vector<std::string_view> split_row(std::string_view line);

}  // namespace paofed::csv
