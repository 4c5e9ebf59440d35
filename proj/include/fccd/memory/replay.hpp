#pragma once

#include <cstdint>
#include <vector>

#include "fccd/matrix.hpp"
#include "fccd/memory/gaussian_memory.hpp"

namespace fccd::memory {

struct ReplayBatch {
  Matrix features;                   // (entries * per_class) x D
  std::vector<std::int32_t> labels;  // class_id of each row
};

// Draws per_class samples from every entry, x = mu + L z with z ~ N(0, I)
// and L the Cholesky factor of the entry's covariance. Each entry has its
// own stream seeded from (seed, class_id), so output does not depend on
// entry order. Rows are grouped by entry in memory order.
ReplayBatch sample_replay(const GaussianMemory& memory, int per_class, std::uint64_t seed);

}  // namespace fccd::memory
