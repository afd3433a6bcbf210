#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <system_error>

namespace apt {

// Shortest round-trip decimal form; keeps CSV output byte-stable across
// runs so determinism checks can diff files directly.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace apt
