#include "semicoupling/io/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "semicoupling/error.hpp"

namespace semicoupling::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) throw ValidationError("not a number: '" + text + "'");
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw ValidationError("CSV (" + schema + ") has no column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_row(std::ofstream& out, const std::vector<std::string>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
  out << '\n';
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "# semico " << table.version << ' ' << table.schema << '\n';
  write_row(out, table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw ValidationError("CSV row width does not match the header");
    write_row(out, row);
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# semico ", 0) != 0)
    throw ValidationError("'" + path + "' lacks the '# semico' header line");
  std::stringstream head(line.substr(9));
  head >> table.version >> table.schema;
  if (!std::getline(in, line)) throw ValidationError("'" + path + "' lacks a column header");
  table.header = split(line);
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != table.header.size())
      throw ValidationError("'" + path + "' line " + std::to_string(lineno) + ": wrong number of fields");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace semicoupling::io
