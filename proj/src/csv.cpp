#include "nise/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace nise {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Index CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw CsvError("column '" + name + "' not found in header");
  }
  return static_cast<Index>(it - header.begin());
}

Vector CsvTable::column(const std::string& name) const {
  return values.col(column_index(name));
}

Matrix CsvTable::columns(const std::vector<std::string>& names) const {
  Matrix out(values.rows(), static_cast<Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    out.col(static_cast<Index>(j)) = column(names[j]);
  }
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  std::istringstream stream(text);
  std::string line;

  CsvTable table;
  if (!std::getline(stream, line)) {
    throw CsvError(origin + ": empty file, expected a header row");
  }
  for (auto& name : split_line(strip_cr(line))) {
    if (name.empty()) {
      throw CsvError(origin + ": empty column name in header");
    }
    if (std::find(table.header.begin(), table.header.end(), name) !=
        table.header.end()) {
      throw CsvError(origin + ": duplicate column name '" + name + "'");
    }
    table.header.push_back(name);
  }
  const std::size_t width = table.header.size();

  std::vector<double> data;
  Index rows = 0;
  int lineno = 1;
  while (std::getline(stream, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() && stream.eof()) break;
    const auto cells = split_line(line);
    if (cells.size() != width) {
      throw CsvError(origin + ": row " + std::to_string(lineno) + " has " +
                     std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(width));
    }
    for (std::size_t j = 0; j < width; ++j) {
      const std::string& cell = cells[j];
      double value = 0.0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc{} || ptr != end || cell.empty()) {
        throw CsvError(origin + ": row " + std::to_string(lineno) +
                       ", column " + std::to_string(j + 1) + " ('" +
                       table.header[j] + "'): cannot parse '" + cell +
                       "' as a number");
      }
      data.push_back(value);
    }
    ++rows;
  }
  if (rows == 0) {
    throw CsvError(origin + ": no data rows");
  }

  table.values.resize(rows, static_cast<Index>(width));
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < static_cast<Index>(width); ++j) {
      table.values(i, j) = data[static_cast<std::size_t>(i) * width +
                                static_cast<std::size_t>(j)];
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw CsvError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str(), path);
}

std::string csv_to_string(const std::vector<std::string>& header,
                          const Matrix& values) {
  std::ostringstream out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  char buf[32];
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", values(i, j));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header, const Matrix& values) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw CsvError("cannot open '" + path + "' for writing");
  }
  file << csv_to_string(header, values);
  if (!file) {
    throw CsvError("failed writing '" + path + "'");
  }
}

}  // namespace nise
