#include "fccd/classifier/baselines.hpp"

#include <limits>

#include "fccd/errors.hpp"

namespace fccd::classifier {
namespace {

void check(const memory::GaussianMemory& memory, const Matrix& features) {
  if (memory.empty()) throw PreconditionError("classifier baseline: memory is empty");
  if (features.cols() != memory.dim()) throw PreconditionError("classifier baseline: dimension mismatch");
}

}  // namespace

std::vector<std::int32_t> ncm_predict(const memory::GaussianMemory& memory, const Matrix& features) {
  check(memory, features);
  std::vector<std::int32_t> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto x = features.row(i);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : memory.entries()) {
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = static_cast<double>(x[j]) - g.mean[j];
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        out[i] = g.class_id;
      }
    }
  }
  return out;
}

std::vector<std::int32_t> mahalanobis_predict(const memory::GaussianMemory& memory, const Matrix& features) {
  check(memory, features);
  std::vector<std::vector<double>> factors;
  factors.reserve(memory.size());
  for (const auto& g : memory.entries()) factors.push_back(memory::cholesky_lower(g));

  std::vector<std::int32_t> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < memory.size(); ++c) {
      const double d = memory::mahalanobis_squared(factors[c], memory[c].mean, features.row(i));
      if (d < best) {
        best = d;
        out[i] = memory[c].class_id;
      }
    }
  }
  return out;
}

}  // namespace fccd::classifier
