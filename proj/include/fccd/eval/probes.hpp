#pragma once

#include <cstdint>
#include <vector>

#include "fccd/classifier/train.hpp"
#include "fccd/clustering/kmeans.hpp"
#include "fccd/dataio/embedding_set.hpp"

namespace fccd::eval {

// k-means with k = number of distinct labels, then Hungarian-matched accuracy.
double kmeans_acc_probe(const EmbeddingSet& set, std::uint64_t seed, const clustering::KMeansOptions& opts = {});

struct ProbeResult {
  double accuracy = 0.0;
  // Test classes that never occur in train; their rows are scored as errors.
  std::vector<std::int32_t> unseen_test_classes;
};

// Fresh linear head trained with plain cross-entropy on `train`, scored on
// `test`. The loss field of `cfg` is ignored.
ProbeResult linear_probe(const EmbeddingSet& train, const EmbeddingSet& test, const classifier::TrainConfig& cfg);

}  // namespace fccd::eval
