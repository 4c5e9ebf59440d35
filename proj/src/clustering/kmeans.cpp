#include "fccd/clustering/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fccd/errors.hpp"
#include "fccd/random.hpp"
#include "fccd/simd/kernels.hpp"

namespace fccd::clustering {
namespace {

void copy_row(std::span<const float> src, std::span<float> dst) { std::copy(src.begin(), src.end(), dst.begin()); }

// Index i with cumulative[i] > r, where r is uniform in [0, total).
std::size_t sample_weighted(const std::vector<double>& weights, double total, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, total);
  const double r = uni(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (r < acc) return i;
  }
  return last_positive;
}

// Greedy k-means++: each new center is the best of several D^2-weighted
// candidates, judged by the potential it leaves behind.
Matrix seed_centers(const Matrix& data, std::size_t k, Rng& rng) {
  const std::size_t n = data.rows();
  Matrix centers(k, data.cols());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  copy_row(data.row(pick(rng)), centers.row(0));

  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = simd::squared_l2(data.row(i), centers.row(0));

  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::vector<double> candidate_closest(n);
  std::vector<double> best_closest(n);
  for (std::size_t c = 1; c < k; ++c) {
    double potential = 0.0;
    for (double v : closest) potential += v;
    std::size_t best = n;
    double best_potential = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t cand = potential > 0.0 ? sample_weighted(closest, potential, rng) : pick(rng);
      double cand_potential = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        candidate_closest[i] = std::min<double>(closest[i], simd::squared_l2(data.row(i), data.row(cand)));
        cand_potential += candidate_closest[i];
      }
      if (cand_potential < best_potential) {
        best_potential = cand_potential;
        best = cand;
        best_closest.swap(candidate_closest);
      }
    }
    copy_row(data.row(best), centers.row(c));
    closest.swap(best_closest);
  }
  return centers;
}

double exact_inertia(const Matrix& data, const std::vector<std::int32_t>& labels, const Matrix& centers) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.row(i);
    const auto c = centers.row(static_cast<std::size_t>(labels[i]));
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = static_cast<double>(x[j]) - c[j];
      total += d * d;
    }
  }
  return total;
}

// Assigns every point to its nearest center, then moves the farthest point
// of a multi-point cluster into each empty cluster. Returns the inertia.
double assign(const Matrix& data, Matrix& centers, std::vector<std::int32_t>& labels,
              std::vector<double>& dist, std::vector<std::size_t>& sizes) {
  const std::size_t n = data.rows();
  const std::size_t k = centers.rows();
  std::fill(sizes.begin(), sizes.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    float d = 0.0f;
    const std::size_t c = nearest_row(centers, data.row(i), &d);
    labels[i] = static_cast<std::int32_t>(c);
    dist[i] = d;
    ++sizes[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (sizes[static_cast<std::size_t>(labels[i])] < 2) continue;
      if (far == n || dist[i] > dist[far]) far = i;
    }
    // k <= n guarantees a donor exists.
    --sizes[static_cast<std::size_t>(labels[far])];
    labels[far] = static_cast<std::int32_t>(c);
    dist[far] = 0.0;
    sizes[c] = 1;
    copy_row(data.row(far), centers.row(c));
  }
  return exact_inertia(data, labels, centers);
}

// Recomputes centers as cluster means. Returns the summed squared shift.
double update_centers(const Matrix& data, const std::vector<std::int32_t>& labels,
                      const std::vector<std::size_t>& sizes, Matrix& centers) {
  const std::size_t dim = data.cols();
  std::vector<double> sums(centers.rows() * dim, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.row(i);
    double* s = sums.data() + static_cast<std::size_t>(labels[i]) * dim;
    for (std::size_t j = 0; j < dim; ++j) s[j] += x[j];
  }
  double shift = 0.0;
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    auto row = centers.row(c);
    const double inv = 1.0 / static_cast<double>(sizes[c]);
    for (std::size_t j = 0; j < dim; ++j) {
      const float next = static_cast<float>(sums[c * dim + j] * inv);
      const double delta = static_cast<double>(next) - row[j];
      shift += delta * delta;
      row[j] = next;
    }
  }
  return shift;
}

double mean_feature_variance(const Matrix& data) {
  const std::size_t n = data.rows();
  const std::size_t dim = data.cols();
  double total = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += data(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = data(i, j) - mean;
      var += d * d;
    }
    total += var / static_cast<double>(n);
  }
  return total / static_cast<double>(dim);
}

ClusterAssignment run_once(const Matrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options,
                           double tol_abs) {
  Rng rng(seed);
  ClusterAssignment out;
  out.centers = seed_centers(data, k, rng);
  out.labels.assign(data.rows(), 0);
  out.sizes.assign(k, 0);
  std::vector<double> dist(data.rows());

  for (int it = 0; it < options.max_iters; ++it) {
    out.inertia_history.push_back(assign(data, out.centers, out.labels, dist, out.sizes));
    out.iterations = it + 1;
    const double shift = update_centers(data, out.labels, out.sizes, out.centers);
    if (shift <= tol_abs) break;
  }
  out.inertia = exact_inertia(data, out.labels, out.centers);
  out.inertia_history.push_back(out.inertia);
  return out;
}

}  // namespace

std::size_t nearest_row(const Matrix& centers, std::span<const float> x, float* squared_distance) {
  std::size_t best = 0;
  float best_d = std::numeric_limits<float>::infinity();
  for (std::size_t c = 0; c < centers.rows(); ++c) {
    const float d = simd::squared_l2(x, centers.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (squared_distance != nullptr) *squared_distance = best_d;
  return best;
}

ClusterAssignment kmeans(const Matrix& data, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k <= 0) throw PreconditionError("kmeans: k must be positive, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > data.rows()) {
    throw PreconditionError("kmeans: k = " + std::to_string(k) + " exceeds N = " + std::to_string(data.rows()));
  }
  if (options.max_iters <= 0 || options.restarts <= 0 || options.tol < 0.0) {
    throw PreconditionError("kmeans: invalid options");
  }
  const double tol_abs = options.tol * mean_feature_variance(data);
  ClusterAssignment best;
  for (int r = 0; r < options.restarts; ++r) {
    ClusterAssignment run =
        run_once(data, static_cast<std::size_t>(k), derive_seed(seed, {0x6b6d65616e73ull, static_cast<std::uint64_t>(r)}),
                 options, tol_abs);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

ClusterAssignment kmeans(const EmbeddingSet& set, int k, std::uint64_t seed, const KMeansOptions& options) {
  return kmeans(set.data, k, seed, options);
}

}  // namespace fccd::clustering
