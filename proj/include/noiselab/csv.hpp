#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace noiselab {

// Deterministic CSV assembly: UTF-8, header row, '.' decimal separator, '\n' line ends.
// Numbers are rendered by shortest round-trip formatting, so equal doubles always
// produce equal bytes regardless of locale or platform stream state.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void row(const std::vector<double>& values);
  // Pre-rendered cells (labels mixed with numbers formatted via format()).
  void row_mixed(const std::vector<std::string>& cells);

  const std::string& str() const { return buf_; }
  std::size_t rows() const { return rows_; }
  void write_file(const std::string& path) const;

  static std::string format(double v);

 private:
  std::size_t cols_ = 0;
  std::string buf_;
  std::size_t rows_ = 0;
};

// Entire file as bytes; throws ValidationError when unreadable.
std::string read_file_bytes(const std::string& path);

}  // namespace noiselab
