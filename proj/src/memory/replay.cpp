#include "fccd/memory/replay.hpp"

#include <random>

#include "fccd/errors.hpp"
#include "fccd/random.hpp"

namespace fccd::memory {

ReplayBatch sample_replay(const GaussianMemory& memory, int per_class, std::uint64_t seed) {
  if (memory.empty()) throw PreconditionError("sample_replay: memory is empty");
  if (per_class <= 0) throw PreconditionError("sample_replay: per_class must be positive");
  const std::size_t dim = memory.dim();
  const std::size_t m = static_cast<std::size_t>(per_class);

  ReplayBatch out;
  out.features = Matrix(memory.size() * m, dim);
  out.labels.reserve(memory.size() * m);
  std::vector<double> z(dim);
  std::size_t row = 0;
  for (const auto& g : memory.entries()) {
    const auto lower = cholesky_lower(g);
    Rng rng(derive_seed(seed, {0x7265706cull, static_cast<std::uint64_t>(g.class_id)}));
    std::normal_distribution<double> normal;
    for (std::size_t s = 0; s < m; ++s, ++row) {
      for (double& v : z) v = normal(rng);
      auto x = out.features.row(row);
      for (std::size_t i = 0; i < dim; ++i) {
        double v = g.mean[i];
        const double* l = lower.data() + i * dim;
        if (g.mode == CovarianceMode::diagonal) {
          v += l[i] * z[i];
        } else {
          for (std::size_t j = 0; j <= i; ++j) v += l[j] * z[j];
        }
        x[i] = static_cast<float>(v);
      }
      out.labels.push_back(g.class_id);
    }
  }
  return out;
}

}  // namespace fccd::memory
