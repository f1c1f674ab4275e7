#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace starsql::util {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Lowercases and collapses every whitespace run to one space.
std::string normalize_ws_lower(std::string_view s);
std::string collapse_ws(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split_lines(std::string_view s);
std::string format_fixed(double value, int digits);

}  // namespace starsql::util
