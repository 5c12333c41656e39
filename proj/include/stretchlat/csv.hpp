#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace stretchlat {

// Shortest round-trip-exact decimal form ("%.17g"); CSV output must be
// byte-identical across thread counts and reruns.
std::string fmt17(double x);

std::string join(const std::vector<std::string>& fields, char sep);

// Doubles joined with ';' so the result stays a single CSV field.
std::string join17(const std::vector<double>& values);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  void write(const std::string& path) const;  // throws on I/O failure
};

}  // namespace stretchlat
