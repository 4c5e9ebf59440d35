#include "fccd/eval/mapping.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "fccd/dataio/embedding_set.hpp"
#include "fccd/errors.hpp"
#include "fccd/eval/hungarian.hpp"

namespace fccd::eval {

std::optional<std::int32_t> ClusterMapping::truth_of(std::size_t head) const {
  return head < entries_.size() ? entries_[head].truth : std::nullopt;
}

bool ClusterMapping::maps_truth(std::int32_t truth) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.truth == truth; });
}

void ClusterMapping::append_session(std::int32_t session, std::span<const std::optional<std::int32_t>> truths) {
  std::set<std::int32_t> fresh;
  for (const auto& t : truths) {
    if (!t) continue;
    if (maps_truth(*t) || !fresh.insert(*t).second) {
      throw PreconditionError("class " + std::to_string(*t) + " is already mapped to a head");
    }
  }
  for (const auto& t : truths) entries_.push_back({t, session});
}

MatchResult match_clusters(std::span<const std::int32_t> clusters, std::size_t k,
                           std::span<const std::int32_t> truth) {
  if (clusters.size() != truth.size()) throw PreconditionError("match_clusters: length mismatch");
  std::vector<std::int32_t> classes;
  for (std::int32_t t : truth) {
    if (t != kUnlabeled) classes.push_back(t);
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  std::vector<double> counts(k * classes.size(), 0.0);
  MatchResult out;
  out.cluster_to_truth.assign(k, std::nullopt);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (truth[i] == kUnlabeled) continue;
    if (clusters[i] < 0 || static_cast<std::size_t>(clusters[i]) >= k) {
      throw PreconditionError("match_clusters: cluster index out of range");
    }
    const auto col = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), truth[i]) - classes.begin());
    counts[static_cast<std::size_t>(clusters[i]) * classes.size() + col] += 1.0;
    ++out.total;
  }
  std::vector<double> cost(counts.size());
  std::transform(counts.begin(), counts.end(), cost.begin(), [](double c) { return -c; });
  const auto assignment = hungarian(cost, k, classes.size());
  for (const auto& [row, col] : assignment.pairs) {
    out.cluster_to_truth[row] = classes[col];
    out.matched += static_cast<std::size_t>(counts[row * classes.size() + col]);
  }
  return out;
}

MapResult map_clusters(std::span<const std::int32_t> clusters, std::size_t k, std::span<const std::int32_t> truth,
                       std::int32_t session, const ClusterMapping& prior) {
  for (std::int32_t t : truth) {
    if (t != kUnlabeled && prior.maps_truth(t)) {
      throw PreconditionError("map_clusters: class " + std::to_string(t) + " was mapped in an earlier session");
    }
  }
  const auto match = match_clusters(clusters, k, truth);
  MapResult out{prior, match.accuracy()};
  out.mapping.append_session(session, match.cluster_to_truth);
  return out;
}

void encode_mapping(dataio::ByteWriter& w, const ClusterMapping& mapping) {
  w.put_u64(mapping.head_count());
  for (const auto& e : mapping.entries()) {
    w.put_i32(e.session);
    w.put_i32(e.truth ? *e.truth : kUnlabeled);
  }
}

ClusterMapping decode_mapping(dataio::ByteReader& r) {
  const std::uint64_t n = r.get_u64();
  if (n > r.remaining() / 8) throw FormatError("mapping: declared size exceeds input", r.offset() - 8);
  ClusterMapping mapping;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t at = r.offset();
    const std::int32_t session = r.get_i32();
    const std::int32_t truth = r.get_i32();
    const std::optional<std::int32_t> t = truth == kUnlabeled ? std::nullopt : std::optional(truth);
    try {
      mapping.append_session(session, std::span(&t, 1));
    } catch (const PreconditionError& e) {
      throw FormatError(std::string("mapping: ") + e.what(), at);
    }
  }
  return mapping;
}

}  // namespace fccd::eval
