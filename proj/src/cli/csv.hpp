#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace conullity::cli {

// Streams rows into <dir>/<name>, header first, LF line ends. Cell counts
// are checked against the header so a schema drift fails loudly instead of
// producing a ragged file.
class CsvWriter {
 public:
  CsvWriter(const std::string& dir, const std::string& name,
            const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);

  const std::string& path() const { return path_; }

  // full round-trip precision; the same double always prints the same bytes
  static std::string num(double v);
  static std::string num(int v);

 private:
  std::string path_;
  std::size_t width_ = 0;
  std::ofstream out_;
};

}  // namespace conullity::cli
