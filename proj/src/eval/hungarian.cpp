#include "fccd/eval/hungarian.hpp"

#include <cmath>
#include <limits>

#include "fccd/errors.hpp"

namespace fccd::eval {

// Shortest augmenting path with row/column potentials, O(n^3).
Assignment hungarian(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  if (cost.size() != rows * cols) throw PreconditionError("hungarian: cost size does not match shape");
  for (double c : cost) {
    if (!std::isfinite(c)) throw PreconditionError("hungarian: non-finite cost entry");
  }
  Assignment out;
  if (rows == 0 || cols == 0) return out;

  const std::size_t n = std::max(rows, cols);
  auto at = [&](std::size_t i, std::size_t j) { return i < rows && j < cols ? cost[i * cols + j] : 0.0; };
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based arrays; index 0 is the virtual root of each augmenting tree.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match_col[j] - 1] = j - 1;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = row_to_col[i];
    if (j < cols) {
      out.pairs.emplace_back(i, j);
      out.total_cost += cost[i * cols + j];
    }
  }
  return out;
}

}  // namespace fccd::eval
