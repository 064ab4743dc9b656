#pragma once

#include <cstdio>
#include <initializer_list>
#include <string>

namespace qsd {

// Round-trip exact. The library never calls setlocale, so the decimal mark
// stays ".".
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(std::initializer_list<std::string> cells) {
  std::string row;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) row += ',';
    row += c;
    first = false;
  }
  row += '\n';
  return row;
}

}  // namespace qsd
