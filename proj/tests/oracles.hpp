#pragma once

// Slow, obviously-correct reference implementations the tests compare
// against. None of them call into the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

// Minimum total cost over every assignment of min(R, C) pairs.
inline double brute_force_assignment(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  const std::size_t n = std::max(rows, cols);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (perm[r] < cols) total += cost[r * cols + perm[r]];
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// -log softmax(H / (tau |H|))_y in long double.
inline long double logit_norm_loss(const std::vector<double>& h, std::size_t y, double tau) {
  long double norm = 0.0L;
  for (double v : h) norm += static_cast<long double>(v) * v;
  norm = std::sqrt(norm);
  long double mx = -std::numeric_limits<long double>::infinity();
  std::vector<long double> z(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    z[i] = h[i] / (tau * norm);
    mx = std::max(mx, z[i]);
  }
  long double s = 0.0L;
  for (auto v : z) s += std::exp(v - mx);
  return -(z[y] - mx - std::log(s));
}

template <class F>
std::vector<double> central_difference(F f, std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const long double up = f(x);
    x[i] = keep - step;
    const long double down = f(x);
    x[i] = keep;
    g[i] = static_cast<double>((up - down) / (2.0L * step));
  }
  return g;
}

using Points = std::vector<std::vector<double>>;

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

inline std::vector<double> mean_of(const Points& pts, const std::vector<std::size_t>& idx) {
  std::vector<double> m(pts[0].size(), 0.0);
  for (auto i : idx) {
    for (std::size_t d = 0; d < m.size(); ++d) m[d] += pts[i][d];
  }
  for (double& v : m) v /= static_cast<double>(idx.size());
  return m;
}

inline double sse(const Points& pts, const std::vector<std::size_t>& idx) {
  const auto m = mean_of(pts, idx);
  double s = 0.0;
  for (auto i : idx) s += sq_dist(pts[i], m);
  return s;
}

// Best split of the points into two non-empty groups by within-group SSE;
// returns a membership mask for the group holding point 0.
inline std::vector<bool> best_two_partition(const Points& pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> best_mask;
  for (std::uint64_t m = 1; m < (1ull << n) - 1; ++m) {
    if (!(m & 1ull)) continue;
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < n; ++i) ((m >> i) & 1ull ? a : b).push_back(i);
    const double s = sse(pts, a) + sse(pts, b);
    if (s < best) {
      best = s;
      best_mask.assign(n, false);
      for (auto i : a) best_mask[i] = true;
    }
  }
  return best_mask;
}

// Agglomerative centroid merging that recomputes every cluster's center from
// its member list on each step and rescans all pairs.
struct MergeStep {
  std::size_t i, j;
  double distance;
};

inline std::vector<MergeStep> exhaustive_merge(const Points& centers, const std::vector<std::size_t>& sizes,
                                               std::size_t target) {
  std::vector<std::vector<std::size_t>> members(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) members[i] = {i};
  std::vector<bool> alive(centers.size(), true);
  auto center = [&](std::size_t c) {
    std::vector<double> m(centers[0].size(), 0.0);
    double w = 0.0;
    for (auto i : members[c]) {
      for (std::size_t d = 0; d < m.size(); ++d) m[d] += centers[i][d] * static_cast<double>(sizes[i]);
      w += static_cast<double>(sizes[i]);
    }
    for (double& v : m) v /= w;
    return m;
  };
  std::vector<MergeStep> log;
  std::size_t count = centers.size();
  while (count > target) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < centers.size(); ++j) {
        if (!alive[j]) continue;
        const double d = std::sqrt(sq_dist(center(i), center(j)));
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    alive[bj] = false;
    --count;
    log.push_back({bi, bj, best});
  }
  return log;
}

// Best accuracy over every one-to-one relabeling of k clusters onto k classes.
inline double permutation_accuracy(const std::vector<int>& clusters, const std::vector<int>& truth, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) hits += perm[static_cast<std::size_t>(clusters[i])] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return 100.0 * static_cast<double>(best) / static_cast<double>(clusters.size());
}

}  // namespace oracle
