#pragma once

#include <charconv>
#include <string>

namespace wbc {

// Shortest round-trip decimal form of a double; locale-independent, so CSV
// output is byte-identical for identical values.
inline std::string csv_num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace wbc
