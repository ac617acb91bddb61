#pragma once

#include <iosfwd>
#include <vector>

namespace ransomneg::bench {

struct Cell {
  unsigned k_theta = 0;
  unsigned k = 0;
  double median_ms = 0;
  double max_ms = 0;
  bool all_ok = true;  // every repetition completed without abort and both sides agreed
};

struct Grid {
  std::vector<unsigned> k_thetas;
  std::vector<unsigned> ks;
  std::vector<Cell> cells;  // row-major: k_theta outer, k inner

  const Cell& at(std::size_t row, std::size_t col) const { return cells.at(row * ks.size() + col); }
};

// Times seeded loopback sessions for every (k_theta, k) pair; one warm-up
// session precedes each cell.
Grid run_grid(const std::vector<unsigned>& k_thetas, const std::vector<unsigned>& ks, unsigned repetitions,
              unsigned long long seed = 1);

// Median time non-decreasing along every row and column.
bool monotone(const Grid& g);

// Table with columns k_theta, k, Execution time.
void print_table(std::ostream& os, const Grid& g);

}  // namespace ransomneg::bench
