#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace scenmine {

/// Round to `precision` decimals, then drop trailing zeros while keeping at
/// least one fractional digit: 389.16 -> "389.16", 0 -> "0.0". Negative zero
/// prints as "0.0".
[[nodiscard]] std::string format_decimal(double value, int precision);

/// Shortest round-trip representation (std::to_chars).
[[nodiscard]] std::string format_shortest(double value);

[[nodiscard]] std::optional<double> parse_double(std::string_view text);

/// Accepts plain integers and integral decimals such as "12.0".
[[nodiscard]] std::optional<std::int64_t> parse_integer(std::string_view text);

[[nodiscard]] std::string_view trim(std::string_view text);

[[nodiscard]] std::string to_lower(std::string_view text);

}  // namespace scenmine
