#pragma once

#include <charconv>
#include <string>

#include "chainflow/types.hpp"

namespace chainflow {

// Shortest decimal form that round-trips the exact double; locale-free, so
// repeated runs emit byte-identical text. Infinity prints as "inf".
inline std::string fmt_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace chainflow
