#include "scenmine/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

namespace scenmine {

std::string format_decimal(double value, int precision) {
  if (!std::isfinite(value)) {
    return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  }
  precision = std::clamp(precision, 1, 17);
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  std::string out(buf, static_cast<std::size_t>(n));
  const auto dot = out.find('.');
  if (dot != std::string::npos) {
    std::size_t end = out.size();
    while (end > dot + 2 && out[end - 1] == '0') {
      --end;
    }
    out.resize(end);
  }
  if (out == "-0.0") {
    out = "0.0";
  }
  return out;
}

std::string format_shortest(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return std::nullopt;
  }
  std::int64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec == std::errc{} && res.ptr == text.data() + text.size()) {
    return value;
  }
  const auto as_double = parse_double(text);
  if (as_double && std::isfinite(*as_double) && std::floor(*as_double) == *as_double &&
      std::abs(*as_double) < 9.0e15) {
    return static_cast<std::int64_t>(*as_double);
  }
  return std::nullopt;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace scenmine
