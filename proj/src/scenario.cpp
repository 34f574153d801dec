#include "ccmpc/scenario.hpp"

#include <sstream>

#include "ccmpc/csv.hpp"

namespace ccmpc {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void write_scenarios_csv(const ScenarioSet& s, const std::string& path) {
  CsvWriter w(path);
  std::vector<std::string> cols;
  for (int k = 0; k <= s.N; ++k) {
    for (int d = 0; d < s.n_theta; ++d) {
      std::string name = "theta_" + std::to_string(k);
      if (s.n_theta > 1) name += "_" + std::to_string(d);
      cols.push_back(name);
    }
  }
  w.header(cols);
  std::vector<std::string> cells(cols.size());
  for (int i = 0; i < s.S; ++i) {
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) cells[j] = format_double(s.data(i, j));
    w.row(cells);
  }
}

ScenarioSet read_scenarios_csv(const std::string& path, int n_theta) {
  std::ifstream in(path);
  require(in.good(), "read_scenarios_csv: cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "read_scenarios_csv: empty file");
  int cols = 1;
  for (char c : line) {
    if (c == ',') ++cols;
  }
  require(cols % n_theta == 0, "read_scenarios_csv: column count not divisible by n_theta");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    require(static_cast<int>(r.size()) == cols, "read_scenarios_csv: ragged row");
    rows.push_back(std::move(r));
  }
  ScenarioSet s;
  s.resize(static_cast<int>(rows.size()), cols / n_theta - 1, n_theta);
  for (int i = 0; i < s.S; ++i) {
    for (int j = 0; j < cols; ++j) s.data(i, j) = rows[i][j];
  }
  return s;
}

}  // namespace ccmpc
