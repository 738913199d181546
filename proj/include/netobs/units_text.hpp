#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "netobs/error.hpp"

namespace netobs::text {

namespace detail {

struct Suffix {
  std::string_view name;
  int exponent;  // power of ten applied to the mantissa
};

inline constexpr std::array<Suffix, 5> rate_suffixes{{
    {"bps", 0}, {"kbps", 3}, {"Kbps", 3}, {"Mbps", 6}, {"Gbps", 9},
}};

inline constexpr std::array<Suffix, 4> time_suffixes{{
    {"s", 0}, {"ms", -3}, {"us", -6}, {"ns", -9},
}};

inline std::size_t numeric_prefix(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  while (i < s.size() && ((s[i] >= '0' && s[i] <= '9') || s[i] == '.')) ++i;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
    if (j < s.size() && s[j] >= '0' && s[j] <= '9') {
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
      i = j;
    }
  }
  return i;
}

[[noreturn]] inline void fail(std::string_view what, std::string_view text, std::string_view why) {
  throw Error(ErrorCode::config_unit_parse,
              std::string(what) + " '" + std::string(text) + "': " + std::string(why));
}

// Decimal scaling is applied to the text so that "3.33ms" parses to the
// same double as "0.00333".
inline double scaled(std::string_view what, std::string_view text, std::string_view number,
                     int exponent) {
  std::string digits(number);
  int extra = 0;
  if (auto e = digits.find_first_of("eE"); e != std::string::npos) {
    const std::string tail = digits.substr(e + 1);
    auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), extra);
    if (ec != std::errc() || p != tail.data() + tail.size()) fail(what, text, "bad exponent");
    digits.resize(e);
  }
  if (digits.empty() || digits.find_first_of("0123456789") == std::string::npos) {
    fail(what, text, "missing number");
  }
  digits += "e" + std::to_string(exponent + extra);
  double value = 0.0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || p != digits.data() + digits.size()) fail(what, text, "bad number");
  return value;
}

template <std::size_t N>
double parse_with(std::string_view what, std::string_view text,
                  const std::array<Suffix, N>& suffixes) {
  const std::size_t n = numeric_prefix(text);
  const std::string_view number = text.substr(0, n);
  const std::string_view unit = text.substr(n);
  if (!number.empty() && number.front() == '-') fail(what, text, "negative value");
  if (unit.empty()) fail(what, text, "missing unit suffix");
  for (const auto& s : suffixes) {
    if (s.name == unit) return scaled(what, text, number, s.exponent);
  }
  fail(what, text, "unknown unit '" + std::string(unit) + "'");
}

}  // namespace detail

// "1Mbps", "250kbps", "1e9bps" -> bits per second.
inline double parse_rate(std::string_view text) {
  return detail::parse_with("rate", text, detail::rate_suffixes);
}

// "100ms", "3.33ms", "1s" -> seconds.
inline double parse_duration(std::string_view text) {
  return detail::parse_with("duration", text, detail::time_suffixes);
}

// "360B" (octets) or "2880b" / "2880bit" (bits) -> bits. Integral only.
inline std::uint64_t parse_size(std::string_view text) {
  const std::size_t n = detail::numeric_prefix(text);
  const std::string_view number = text.substr(0, n);
  const std::string_view unit = text.substr(n);
  if (!number.empty() && number.front() == '-') detail::fail("size", text, "negative value");
  if (unit.empty()) detail::fail("size", text, "missing unit suffix");
  std::uint64_t multiplier = 0;
  if (unit == "B" || unit == "byte" || unit == "bytes") multiplier = 8;
  if (unit == "b" || unit == "bit" || unit == "bits") multiplier = 1;
  if (multiplier == 0) detail::fail("size", text, "unknown unit '" + std::string(unit) + "'");
  std::uint64_t value = 0;
  auto [p, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (ec != std::errc() || p != number.data() + number.size()) {
    detail::fail("size", text, "sizes must be whole numbers");
  }
  return value * multiplier;
}

// Shortest text that parses back to exactly `v`. Plain decimals in the
// everyday range, exponent form outside it.
inline std::string format_number(double v) {
  std::array<char, 400> buf{};
  const double mag = v < 0 ? -v : v;
  const bool plain = v == 0.0 || (mag >= 1e-4 && mag < 1e16);
  auto [p, ec] = plain ? std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::fixed)
                       : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

inline std::string format_rate(double bps) { return format_number(bps) + "bps"; }
inline std::string format_duration(double seconds) { return format_number(seconds) + "s"; }
inline std::string format_size(std::uint64_t bits) {
  return bits % 8 == 0 ? std::to_string(bits / 8) + "B" : std::to_string(bits) + "b";
}

}  // namespace netobs::text
