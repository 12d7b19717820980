#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gas {

// Locale-independent numeric formatting (std::to_chars). g9 is the CSV
// contract: 9 significant digits; g17 round-trips exactly.
inline std::string format_g(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

inline std::string format_g9(double v) { return format_g(v, 9); }
inline std::string format_g17(double v) { return format_g(v, 17); }

}  // namespace gas
