#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

namespace ghl {

/// "%.16e": scientific notation with 17 significant digits.
std::string format_scientific(double value);

using CsvCell = std::variant<std::string, double, long long>;

class CsvWriter {
 public:
  /// Opens (truncates) `path` and writes the header row.
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<CsvCell>& cells);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

/// Reads a CSV with a header row into string cells (no quoting support).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace ghl
