#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace fomip {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Rounds through a 9-significant-digit decimal representation so that
// serialized reports are stable across runs and platforms.
inline double round9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace fomip
