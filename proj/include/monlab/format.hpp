#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace monlab {

// Shortest round-trip decimal representation; locale independent.
std::string format_double(double value);

// Fixed-point representation with `precision` fractional digits.
std::string format_fixed(double value, int precision);

// Strict parse of a whole token; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace monlab
