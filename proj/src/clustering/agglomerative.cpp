#include "fccd/clustering/agglomerative.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fccd/errors.hpp"

namespace fccd::clustering {
namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

MergeResult agglomerative_merge(const Matrix& centers, std::span<const std::size_t> sizes, const MergeStop& stop) {
  const std::size_t k = centers.rows();
  if (k == 0) throw PreconditionError("agglomerative_merge: no clusters");
  if (sizes.size() != k) throw PreconditionError("agglomerative_merge: sizes do not match centers");
  if (const auto* t = std::get_if<TargetCount>(&stop); t && (t->count < 1 || t->count > k)) {
    throw PreconditionError("agglomerative_merge: target count " + std::to_string(t->count) + " outside [1, " +
                            std::to_string(k) + "]");
  }

  std::vector<std::vector<double>> pos(k);
  std::vector<double> weight(k);
  for (std::size_t c = 0; c < k; ++c) {
    pos[c].assign(centers.row(c).begin(), centers.row(c).end());
    weight[c] = static_cast<double>(sizes[c]);
  }
  std::vector<bool> alive(k, true);
  std::vector<std::size_t> owner(k);
  for (std::size_t c = 0; c < k; ++c) owner[c] = c;

  // Pairwise distances for i < j; only the merged row changes per step,
  // so refreshing it is the same as recomputing the whole matrix.
  std::vector<double> dist(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) dist[i * k + j] = distance(pos[i], pos[j]);
  }

  MergeResult out;
  std::size_t remaining = k;
  while (remaining > 1) {
    if (const auto* t = std::get_if<TargetCount>(&stop); t && remaining <= t->count) break;

    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < k; ++j) {
        if (alive[j] && dist[i * k + j] < best) {
          best = dist[i * k + j];
          bi = i;
          bj = j;
        }
      }
    }
    if (const auto* th = std::get_if<DistanceThreshold>(&stop); th && best > th->threshold) break;

    const double wi = weight[bi];
    const double wj = weight[bj];
    const double total = wi + wj;
    for (std::size_t d = 0; d < pos[bi].size(); ++d) {
      pos[bi][d] = total > 0.0 ? (wi * pos[bi][d] + wj * pos[bj][d]) / total : 0.5 * (pos[bi][d] + pos[bj][d]);
    }
    weight[bi] = total;
    alive[bj] = false;
    for (auto& o : owner) {
      if (o == bj) o = bi;
    }
    out.log.push_back({bi, bj, best});
    --remaining;

    for (std::size_t m = 0; m < k; ++m) {
      if (!alive[m] || m == bi) continue;
      const double dm = distance(pos[bi], pos[m]);
      if (m < bi) {
        dist[m * k + bi] = dm;
      } else {
        dist[bi * k + m] = dm;
      }
    }
  }

  std::vector<std::size_t> slot_to_out(k, 0);
  out.centers = Matrix(remaining, centers.cols());
  std::size_t next = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (!alive[c]) continue;
    slot_to_out[c] = next;
    auto row = out.centers.row(next);
    for (std::size_t d = 0; d < row.size(); ++d) row[d] = static_cast<float>(pos[c][d]);
    out.sizes.push_back(static_cast<std::size_t>(std::llround(weight[c])));
    ++next;
  }
  out.group.resize(k);
  for (std::size_t c = 0; c < k; ++c) out.group[c] = slot_to_out[owner[c]];
  return out;
}

}  // namespace fccd::clustering
