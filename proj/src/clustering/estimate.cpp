#include "fccd/clustering/estimate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fccd/errors.hpp"
#include "fccd/random.hpp"

namespace fccd::clustering {

double min_pairwise_distance(const Matrix& centers) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.rows(); ++i) {
    for (std::size_t j = i + 1; j < centers.rows(); ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < centers.cols(); ++d) {
        const double diff = static_cast<double>(centers(i, d)) - centers(j, d);
        s += diff * diff;
      }
      best = std::min(best, std::sqrt(s));
    }
  }
  return best;
}

MergeCalibration calibrate_dmin(const EmbeddingSet& base, int overcluster_factor, std::uint64_t seed,
                                const KMeansOptions& kmeans_options, DminRule rule) {
  if (!base.has_labels()) throw PreconditionError("calibrate_dmin: base session needs labels");
  if (overcluster_factor <= 0) throw PreconditionError("calibrate_dmin: overcluster factor must be positive");
  const auto classes = base.distinct_labels();
  const int c = static_cast<int>(classes.size());
  if (c < 2) throw PreconditionError("calibrate_dmin: need at least 2 classes, got " + std::to_string(c));
  const long long m = static_cast<long long>(overcluster_factor) * c;
  if (m > static_cast<long long>(base.count())) {
    throw PreconditionError("calibrate_dmin: " + std::to_string(m) + " over-clusters exceed N = " +
                            std::to_string(base.count()));
  }

  const auto over = kmeans(base.data, static_cast<int>(m), derive_seed(seed, {0xca1b}), kmeans_options);
  const auto merged = agglomerative_merge(over.centers, over.sizes, TargetCount{static_cast<std::size_t>(c)});

  MergeCalibration calib;
  calib.overcluster_factor = overcluster_factor;
  calib.source_class_count = c;
  calib.rule = rule;
  calib.min_pairwise_distance = min_pairwise_distance(merged.centers);
  calib.last_merge_distance = merged.log.empty() ? calib.min_pairwise_distance : merged.log.back().distance;
  calib.d_min = rule == DminRule::min_pairwise ? calib.min_pairwise_distance : calib.last_merge_distance;
  if (!(calib.d_min > 0.0)) throw NumericError("calibrate_dmin: calibrated distance is zero");
  return calib;
}

ClassCountEstimate estimate_classes(const Matrix& novel, const MergeCalibration& calib, int upper_bound,
                                    std::uint64_t seed, const KMeansOptions& kmeans_options) {
  ClassCountEstimate out;
  out.overclustering = kmeans(novel, upper_bound, derive_seed(seed, {0xe571}), kmeans_options);
  out.initial_clusters = upper_bound;
  out.merges = agglomerative_merge(out.overclustering.centers, out.overclustering.sizes,
                                   DistanceThreshold{calib.d_min});
  out.k = static_cast<int>(out.merges.sizes.size());
  return out;
}

int estimate_class_count(const EmbeddingSet& novel, const MergeCalibration& calib, int upper_bound,
                         std::uint64_t seed, const KMeansOptions& kmeans_options) {
  return estimate_classes(novel.data, calib, upper_bound, seed, kmeans_options).k;
}

}  // namespace fccd::clustering
