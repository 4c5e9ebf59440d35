#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace fccd::eval {

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

// Minimum-cost assignment for a rows x cols row-major cost matrix. Rectangular
// input is padded to square with zero cost; only the min(rows, cols) real
// pairs are returned. Throws PreconditionError on non-finite entries.
Assignment hungarian(const std::vector<double>& cost, std::size_t rows, std::size_t cols);

}  // namespace fccd::eval
