#include "fccd/classifier/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fccd::classifier {

SinkhornNotConverged::SinkhornNotConverged(TransportPlan last, double achieved)
    : NumericError("sinkhorn did not converge in " + std::to_string(last.iterations) +
                   " iterations; marginal error " + std::to_string(achieved)),
      last_(std::move(last)) {}

double marginal_error(const TransportPlan& plan) {
  const double row_target = 1.0 / static_cast<double>(plan.rows);
  const double col_target = 1.0 / static_cast<double>(plan.cols);
  double err = 0.0;
  std::vector<double> col_sums(plan.cols, 0.0);
  for (std::size_t i = 0; i < plan.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < plan.cols; ++j) {
      s += plan(i, j);
      col_sums[j] += plan(i, j);
    }
    err = std::max(err, std::abs(s - row_target));
  }
  for (double s : col_sums) err = std::max(err, std::abs(s - col_target));
  return err;
}

TransportPlan sinkhorn_pseudolabels(const std::vector<double>& predictions, std::size_t rows, std::size_t cols,
                                    const SinkhornOptions& options) {
  if (rows == 0 || cols == 0 || predictions.size() != rows * cols) {
    throw PreconditionError("sinkhorn: prediction matrix shape mismatch");
  }
  if (rows < cols) throw PreconditionError("sinkhorn: need at least as many rows as columns");
  if (options.max_iters <= 0 || options.tol < 0.0) throw PreconditionError("sinkhorn: invalid options");

  TransportPlan plan{rows, cols, predictions, 0, 0.0};
  double total = 0.0;
  for (double& v : plan.q) {
    if (!std::isfinite(v) || v < 0.0) throw PreconditionError("sinkhorn: entries must be finite and non-negative");
    v = std::max(v, 1e-30);
    total += v;
  }
  for (double& v : plan.q) v /= total;

  const double row_target = 1.0 / static_cast<double>(rows);
  const double col_target = 1.0 / static_cast<double>(cols);
  std::vector<double> col_sums(cols);
  for (int it = 1; it <= options.max_iters; ++it) {
    for (std::size_t i = 0; i < rows; ++i) {
      double* r = plan.q.data() + i * cols;
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += r[j];
      const double f = row_target / s;
      for (std::size_t j = 0; j < cols; ++j) r[j] *= f;
    }
    std::fill(col_sums.begin(), col_sums.end(), 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) col_sums[j] += plan.q[i * cols + j];
    }
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) plan.q[i * cols + j] *= col_target / col_sums[j];
    }
    plan.iterations = it;
    plan.marginal_error = marginal_error(plan);
    if (plan.marginal_error <= options.tol) return plan;
  }
  const double achieved = plan.marginal_error;
  throw SinkhornNotConverged(std::move(plan), achieved);
}

}  // namespace fccd::classifier
