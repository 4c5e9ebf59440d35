#pragma once

#include <cstddef>
#include <vector>

#include "fccd/errors.hpp"

namespace fccd::classifier {

struct SinkhornOptions {
  int max_iters = 1000;
  double tol = 1e-9;  // max absolute deviation of any row or column sum
};

// B x K row-major transport plan.
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> q;
  int iterations = 0;
  double marginal_error = 0.0;

  double operator()(std::size_t i, std::size_t j) const { return q[i * cols + j]; }
};

class SinkhornNotConverged : public NumericError {
 public:
  SinkhornNotConverged(TransportPlan last, double achieved);
  const TransportPlan& last() const noexcept { return last_; }
  double achieved_error() const noexcept { return last_.marginal_error; }

 private:
  TransportPlan last_;
};

// Scales a non-negative B x K matrix (entries clamped below at 1e-30) to the
// transport plan with row sums 1/B and column sums 1/K by alternating
// row and column normalization. Throws SinkhornNotConverged, carrying the
// final iterate, if the marginals are not within tol after max_iters rounds.
TransportPlan sinkhorn_pseudolabels(const std::vector<double>& predictions, std::size_t rows, std::size_t cols,
                                    const SinkhornOptions& options = {});

// Largest deviation of a plan's row/column sums from 1/B and 1/K.
double marginal_error(const TransportPlan& plan);

}  // namespace fccd::classifier
