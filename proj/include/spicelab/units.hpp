#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace spicelab {

// Decodes a numeric token with an optional engineering suffix
// (f p n u m k meg g, case-insensitive). "m" is milli, "meg" is 1e6.
inline std::optional<double> parse_engineering(std::string_view token) {
  if (token.empty()) return std::nullopt;
  double mantissa = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, mantissa);
  if (ec != std::errc{} || ptr == begin) return std::nullopt;

  std::string suffix(ptr, end);
  for (auto& c : suffix) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (suffix.empty()) return mantissa;
  if (suffix == "meg") return mantissa * 1e6;
  if (suffix.size() != 1) return std::nullopt;
  switch (suffix[0]) {
    case 'f': return mantissa * 1e-15;
    case 'p': return mantissa * 1e-12;
    case 'n': return mantissa * 1e-9;
    case 'u': return mantissa * 1e-6;
    case 'm': return mantissa * 1e-3;
    case 'k': return mantissa * 1e3;
    case 'g': return mantissa * 1e9;
    default: return std::nullopt;
  }
}

// Shortest representation that parses back to the identical double.
inline std::string format_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Fixed 9-significant-digit scientific notation used for all CSV/JSON
// physical quantities, so identical runs produce byte-identical files.
inline std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8e", v);
  return std::string(buf);
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace spicelab
