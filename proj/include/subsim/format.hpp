#pragma once

// Locale-independent number formatting for CSV/JSON artifacts.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subsim {

namespace detail {
inline std::string to_chars_or_throw(double value, std::chars_format fmt, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, fmt, precision);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}
}  // namespace detail

/// Positions, distances and times: fixed, 3 decimals.
inline std::string format_distance(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  return detail::to_chars_or_throw(value, std::chars_format::fixed, 3);
}

/// Probabilities and ratios: scientific, 6 significant digits.
inline std::string format_probability(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  return detail::to_chars_or_throw(value, std::chars_format::scientific, 5);
}

/// Shortest round-trip form, used in file names.
inline std::string format_shortest(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

/// Parses a comma separated list of reals; throws std::invalid_argument on
/// any malformed entry.
inline std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size())
      throw std::invalid_argument("malformed number '" + std::string(item) + "' in list");
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

}  // namespace subsim
