#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reflectsde::csv {

/// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double x);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Locale-independent parse of a whole field; throws ParseError.
double parse_double(std::string_view field);

/// Strips a trailing '\r' and surrounding blanks.
std::string_view trim(std::string_view s);

}  // namespace reflectsde::csv
