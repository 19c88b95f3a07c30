#include "ouhardy/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ouhardy/error.hpp"

namespace ouh {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_bool(bool v) { return v ? "true" : "false"; }

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw Error(ErrorKind::Input, "csv row has " + std::to_string(cells.size()) + " cells, expected " +
                                      std::to_string(columns_.size()));
  rows_.push_back(std::move(cells));
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void append_line(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += quote(cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  append_line(out, columns_);
  for (const auto& r : rows_) append_line(out, r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Input, "cannot write " + path.string());
  f << str();
  if (!f) throw Error(ErrorKind::Input, "failed writing " + path.string());
}

}  // namespace ouh
