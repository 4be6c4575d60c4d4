#include "coherentflow/text.hpp"

#include <charconv>
#include <system_error>

#include "coherentflow/error.hpp"

namespace cf {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view s, const std::string& where) {
  s = trim(s);
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty(),
          ErrorCode::parse_error, where + ": not a number: '" + std::string(s) + "'");
  return value;
}

std::int64_t parse_int(std::string_view s, const std::string& where) {
  s = trim(s);
  std::int64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty(),
          ErrorCode::parse_error, where + ": not an integer: '" + std::string(s) + "'");
  return value;
}

}  // namespace cf
