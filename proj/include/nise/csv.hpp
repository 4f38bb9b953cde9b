#pragma once

#include <string>
#include <vector>

#include "nise/linalg.hpp"

namespace nise {

// Strict numeric CSV: UTF-8, comma separators, one mandatory header row,
// '.' decimal point, no missing values. Parse errors carry the 1-based row
// and column of the offending cell.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;  // rows x header.size()

  Index column_index(const std::string& name) const;  // throws CsvError
  Vector column(const std::string& name) const;
  Matrix columns(const std::vector<std::string>& names) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

void write_csv(const std::string& path,
               const std::vector<std::string>& header, const Matrix& values);

std::string csv_to_string(const std::vector<std::string>& header,
                          const Matrix& values);

}  // namespace nise
