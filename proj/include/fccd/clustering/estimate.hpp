#pragma once

#include <cstddef>
#include <cstdint>

#include "fccd/clustering/agglomerative.hpp"
#include "fccd/clustering/kmeans.hpp"
#include "fccd/dataio/embedding_set.hpp"
#include "fccd/dataio/manifest.hpp"

namespace fccd::clustering {

using dataio::DminRule;

// Merge threshold learned from the labeled base session.
struct MergeCalibration {
  double d_min = 0.0;
  int overcluster_factor = 3;
  int source_class_count = 0;
  DminRule rule = DminRule::min_pairwise;
  // Both candidate thresholds, whichever rule picked d_min.
  double min_pairwise_distance = 0.0;
  double last_merge_distance = 0.0;

  friend bool operator==(const MergeCalibration&, const MergeCalibration&) = default;
};

// Smallest Euclidean distance between two distinct rows; +inf for one row.
double min_pairwise_distance(const Matrix& centers);

// Over-clusters the labeled base set into factor * C groups, merges back to
// C, and reads the threshold off the survivors. Throws PreconditionError when
// labels are missing, C < 2, or factor * C > N; NumericError if d_min is 0.
MergeCalibration calibrate_dmin(const EmbeddingSet& base, int overcluster_factor, std::uint64_t seed,
                                const KMeansOptions& kmeans_options = {},
                                DminRule rule = DminRule::min_pairwise);

struct ClassCountEstimate {
  int k = 0;
  int initial_clusters = 0;
  ClusterAssignment overclustering;
  MergeResult merges;
};

// Over-cluster into `upper_bound` sub-clusters, then merge while the closest
// pair is within calib.d_min; the survivors are the estimated classes.
ClassCountEstimate estimate_classes(const Matrix& novel, const MergeCalibration& calib, int upper_bound,
                                    std::uint64_t seed, const KMeansOptions& kmeans_options = {});

int estimate_class_count(const EmbeddingSet& novel, const MergeCalibration& calib, int upper_bound,
                         std::uint64_t seed, const KMeansOptions& kmeans_options = {});

}  // namespace fccd::clustering
