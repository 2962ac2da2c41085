#pragma once

#include <cstdio>
#include <ctime>
#include <ostream>
#include <string>
#include <vector>

namespace loggas {

// 17 significant digits round-trips a double exactly
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// "# schema=<name>/1", an optional generation timestamp (suppressed under
// --reproducible so outputs are byte identical), then the column row
inline void csv_header(std::ostream& os, const std::string& schema,
                       const std::vector<std::string>& cols, bool reproducible) {
  os << "# schema=" << schema << "/1\n";
  if (!reproducible) {
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    os << "# generated=" << buf << '\n';
  }
  for (size_t i = 0; i < cols.size(); ++i)
    os << cols[i] << (i + 1 < cols.size() ? ',' : '\n');
}

} // namespace loggas
