#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ouh {

// Fixed formatting for every number written to a report: 12 significant
// digits, "nan", "inf", "-inf".
std::string format_number(double v);
std::string format_bool(bool v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns = {});

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }

  // Throws an Input error when the width does not match the header.
  void add(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ouh
