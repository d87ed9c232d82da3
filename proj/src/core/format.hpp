#pragma once

#include <charconv>
#include <string>

namespace berknash {

// Shortest decimal form that parses back to the same double; zero always
// prints unsigned so equal values cannot render two ways.
inline std::string fmt_double(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace berknash
