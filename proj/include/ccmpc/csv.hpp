#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ccmpc/types.hpp"

namespace ccmpc {

/// Shortest round-trip decimal form; locale independent, reproducible.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Minimal deterministic CSV writer: fixed column order, '\n' line ends.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    require(out_.good(), "CsvWriter: cannot open " + path);
  }
  void header(const std::vector<std::string>& cols) { line_join(cols); }
  void row(const std::vector<std::string>& cells) { line_join(cells); }
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }

 private:
  void line_join(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::ofstream out_;
};

}  // namespace ccmpc
