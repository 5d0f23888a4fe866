#include "cli/csv.hpp"

#include <cstdio>
#include <filesystem>

#include "conullity/errors.hpp"

namespace conullity::cli {

CsvWriter::CsvWriter(const std::string& dir, const std::string& name,
                     const std::vector<std::string>& header) {
  std::filesystem::create_directories(dir);
  path_ = (std::filesystem::path(dir) / name).string();
  width_ = header.size();
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot open " + path_ + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw Error(path_ + ": row has " + std::to_string(cells.size()) +
                " cells against a " + std::to_string(width_) + " column header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

}  // namespace conullity::cli
