#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fccd/classifier/linear_head.hpp"
#include "fccd/dataio/embedding_set.hpp"
#include "fccd/eval/mapping.hpp"

namespace fccd::eval {

// Percentages in [0, 100]. old/new are absent when the subset is empty.
struct Accuracy {
  double last = 0.0;
  std::optional<double> old_acc;
  std::optional<double> new_acc;
  std::size_t n_old = 0;
  std::size_t n_new = 0;
  std::size_t correct_old = 0;
  std::size_t correct_new = 0;

  friend bool operator==(const Accuracy&, const Accuracy&) = default;
};

// Task-agnostic scoring: every test row goes through the full head, the
// winning head is translated through `mapping`, and unmapped heads count as
// errors. Rows whose truth is in `old_classes` form the Old subset, all
// others the New subset. `test` must be labeled and already in the head's
// feature space.
Accuracy evaluate(const classifier::LinearHead& head, const ClusterMapping& mapping, const EmbeddingSet& test,
                  const std::set<std::int32_t>& old_classes);

// Same scoring for precomputed head predictions.
Accuracy score_predictions(std::span<const std::int32_t> predicted_heads, const ClusterMapping& mapping,
                           std::span<const std::int32_t> truth, const std::set<std::int32_t>& old_classes);

struct SessionMetrics {
  std::int32_t session = 0;
  std::int32_t heads_added = 0;
  bool k_estimated = false;
  std::optional<std::int32_t> true_classes;
  std::optional<double> pseudo_label_acc;
  std::optional<Accuracy> accuracy;  // on the joint test rows of classes seen so far

  friend bool operator==(const SessionMetrics&, const SessionMetrics&) = default;
};

struct MetricsReport {
  std::vector<SessionMetrics> sessions;
  Accuracy final_accuracy;  // after the last session, on the full joint test set
  bool sa = true;
  bool gr = true;
  bool ln = true;

  double last_acc() const { return final_accuracy.last; }
  double old_acc() const { return final_accuracy.old_acc.value_or(0.0); }
  double new_acc() const { return final_accuracy.new_acc.value_or(0.0); }
};

// Rounds to one decimal place, as reported.
double round1(double pct);

// One JSON record per session plus a final record; values rounded to one decimal.
std::string report_to_json(const MetricsReport& report);
// Tab-separated: session, heads_added, k_estimated, true_classes,
// pseudo_label_acc, last, old, new. The final row uses session "final".
std::string report_to_table(const MetricsReport& report);

}  // namespace fccd::eval
