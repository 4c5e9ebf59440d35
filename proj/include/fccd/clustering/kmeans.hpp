#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fccd/dataio/embedding_set.hpp"
#include "fccd/matrix.hpp"

namespace fccd::clustering {

struct KMeansOptions {
  int max_iters = 300;
  // Stop once the summed squared center shift falls below
  // tol * (mean per-feature variance of the data).
  double tol = 1e-4;
  // Independent k-means++ seedings; the lowest-inertia run is kept.
  int restarts = 1;
};

struct ClusterAssignment {
  std::vector<std::int32_t> labels;  // in [0, k)
  Matrix centers;                    // k x D, the mean of each cluster
  std::vector<std::size_t> sizes;    // all >= 1, sums to N
  double inertia = 0.0;              // sum of squared distances to assigned centers
  // Inertia after every assignment step of the kept run, followed by the
  // final value. Non-increasing.
  std::vector<double> inertia_history;
  int iterations = 0;

  std::size_t k() const noexcept { return sizes.size(); }
};

// Lloyd's algorithm with greedy k-means++ seeding. Empty clusters are
// refilled with the point farthest from its current center. Deterministic
// for a given seed. Throws PreconditionError unless 1 <= k <= N.
ClusterAssignment kmeans(const Matrix& data, int k, std::uint64_t seed, const KMeansOptions& options = {});
ClusterAssignment kmeans(const EmbeddingSet& set, int k, std::uint64_t seed, const KMeansOptions& options = {});

// Index of the nearest row of `centers`; ties go to the lower index.
std::size_t nearest_row(const Matrix& centers, std::span<const float> x, float* squared_distance = nullptr);

}  // namespace fccd::clustering
