#pragma once

#include <string>
#include <vector>

namespace semicoupling::io {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);
double parse_double(const std::string& text);

/// A CSV file: one comment line "# semico <version> <schema>", a header
/// row, then data rows. No quoting; fields never contain commas.
struct CsvTable {
  std::string schema;
  std::string version;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws ValidationError when absent.
  std::size_t column(const std::string& name) const;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace semicoupling::io
