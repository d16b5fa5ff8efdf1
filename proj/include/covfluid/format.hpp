#pragma once

#include <charconv>
#include <string>

namespace covfluid {

/// Shortest round-trip decimal form; locale independent.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace covfluid
