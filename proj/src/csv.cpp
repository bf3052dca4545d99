#include "noiselab/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "noiselab/errors.hpp"

namespace noiselab {

CsvWriter::CsvWriter(std::vector<std::string> columns) : cols_(columns.size()) {
  if (columns.empty()) throw ValidationError("CsvWriter: no columns");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += columns[i];
  }
  buf_ += '\n';
}

std::string CsvWriter::format(double v) {
  char tmp[64];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  if (ec != std::errc{}) throw NumericalError("CsvWriter: number formatting failed");
  return std::string(tmp, ptr);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != cols_) throw ValidationError("CsvWriter: row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += format(values[i]);
  }
  buf_ += '\n';
  ++rows_;
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  if (cells.size() != cols_) throw ValidationError("CsvWriter: row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += cells[i];
  }
  buf_ += '\n';
  ++rows_;
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("CsvWriter: cannot open for writing: " + path);
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw ValidationError("CsvWriter: write failed: " + path);
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace noiselab
