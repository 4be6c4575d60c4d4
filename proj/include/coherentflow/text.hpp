#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cf {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

std::string_view trim(std::string_view s);
std::vector<std::string> split_csv(std::string_view line);

/// Strict parsers; `where` prefixes the error message (e.g. "file.csv:12").
double parse_double(std::string_view s, const std::string& where);
std::int64_t parse_int(std::string_view s, const std::string& where);

}  // namespace cf
