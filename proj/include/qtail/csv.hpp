#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace qtail {

/// Shortest text for a double that round-trips (17 significant digits).
std::string format_double(double v);

/// Comma-separated file with a units comment line and a header row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& cells);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_;
};

inline constexpr const char* kUnitsLine = "# units: hbar = 1, 2M = 1 (E = k^2)";

}  // namespace qtail
