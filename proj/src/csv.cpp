#include "stretchlat/csv.hpp"

#include <cstdio>
#include <fstream>

#include "stretchlat/errors.hpp"

namespace stretchlat {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += sep;
    out += fields[i];
  }
  return out;
}

std::string join17(const std::vector<double>& values) {
  std::vector<std::string> f;
  f.reserve(values.size());
  for (double v : values) f.push_back(fmt17(v));
  return join(f, ';');
}

std::string CsvTable::to_string() const {
  std::string out = join(header, ',');
  out += '\n';
  for (const auto& row : rows) {
    out += join(row, ',');
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open CSV output file: " + path);
  f << to_string();
  if (!f) throw InputError("failed writing CSV output file: " + path);
}

}  // namespace stretchlat
