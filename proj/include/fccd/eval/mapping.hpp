#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fccd/dataio/binary_io.hpp"

namespace fccd::eval {

// Head index -> ground-truth class ID, built one session at a time and never
// rewritten. Heads left unmapped (surplus clusters) predict nothing valid.
class ClusterMapping {
 public:
  struct Entry {
    std::optional<std::int32_t> truth;
    std::int32_t session = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  std::size_t head_count() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::optional<std::int32_t> truth_of(std::size_t head) const;
  bool maps_truth(std::int32_t truth) const;

  // Appends heads [head_count(), head_count() + truths.size()). Throws
  // PreconditionError if a truth ID is already mapped or repeats.
  void append_session(std::int32_t session, std::span<const std::optional<std::int32_t>> truths);

  friend bool operator==(const ClusterMapping&, const ClusterMapping&) = default;

 private:
  std::vector<Entry> entries_;
};

struct MatchResult {
  // cluster index -> truth ID, nullopt for clusters left out of the matching
  std::vector<std::optional<std::int32_t>> cluster_to_truth;
  std::size_t matched = 0;  // rows whose cluster maps to their own truth
  std::size_t total = 0;    // rows with a ground-truth label
  double accuracy() const { return total == 0 ? 0.0 : 100.0 * static_cast<double>(matched) / total; }
};

// Maximum-overlap matching between `k` clusters and the distinct truth IDs
// (rows labeled -1 are ignored), via Hungarian on negated contingency counts.
MatchResult match_clusters(std::span<const std::int32_t> clusters, std::size_t k,
                           std::span<const std::int32_t> truth);

struct MapResult {
  ClusterMapping mapping;
  double pseudo_label_acc = 0.0;
};

// Extends `prior` with this session's `k` heads. `clusters` holds local
// cluster indices in [0, k) for the session's training rows, `truth` their
// hidden labels. Throws PreconditionError if a truth ID was mapped before.
MapResult map_clusters(std::span<const std::int32_t> clusters, std::size_t k, std::span<const std::int32_t> truth,
                       std::int32_t session, const ClusterMapping& prior);

void encode_mapping(dataio::ByteWriter& w, const ClusterMapping& mapping);
ClusterMapping decode_mapping(dataio::ByteReader& r);

}  // namespace fccd::eval
