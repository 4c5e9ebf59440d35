#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "fccd/matrix.hpp"

namespace fccd::clustering {

struct TargetCount {
  std::size_t count;
};
// Merging continues while the closest pair is at distance <= threshold.
struct DistanceThreshold {
  double threshold;
};
using MergeStop = std::variant<TargetCount, DistanceThreshold>;

struct MergeRecord {
  std::size_t i;  // surviving slot (the smaller index)
  std::size_t j;  // absorbed slot
  double distance;
};

struct MergeResult {
  Matrix centers;                  // surviving clusters, in original slot order
  std::vector<std::size_t> sizes;
  std::vector<MergeRecord> log;    // one entry per merge, in order
  std::vector<std::size_t> group;  // input cluster -> index into centers
};

// Greedy centroid-linkage merging: repeatedly fuses the pair of clusters
// whose centers are closest in Euclidean distance, replacing them with their
// size-weighted mean. Ties go to the lexicographically smallest (i, j).
MergeResult agglomerative_merge(const Matrix& centers, std::span<const std::size_t> sizes, const MergeStop& stop);

}  // namespace fccd::clustering
