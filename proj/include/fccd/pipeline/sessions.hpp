#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fccd/classifier/train.hpp"
#include "fccd/clustering/kmeans.hpp"
#include "fccd/dataio/embedding_set.hpp"
#include "fccd/dataio/manifest.hpp"
#include "fccd/memory/gaussian_memory.hpp"
#include "fccd/pipeline/run_state.hpp"

namespace fccd::pipeline {

struct AblationFlags {
  bool sa = true;  // embeddings come from the adapted backbone; recorded only
  bool gr = true;  // retrain on generative replay from the whole memory
  bool ln = true;  // logit-normalized cross-entropy instead of plain
  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct PipelineConfig {
  int overcluster_factor = 3;
  std::optional<int> estimate_upper_bound;
  dataio::DminRule dmin_rule = dataio::DminRule::min_pairwise;
  int replay_per_class = 256;
  bool bias = true;
  classifier::TrainConfig train;  // seed and loss are set per session
  memory::GaussianOptions gaussian;
  clustering::KMeansOptions kmeans;

  static PipelineConfig from_options(const dataio::ManifestOptions& options);
};

// Labeled session: one Gaussian per class, a head over those classes, the
// identity mapping and the merge calibration. Features are L2-normalized
// here; callers pass raw embeddings.
RunState run_session_zero(RunState state, const EmbeddingSet& base, const AblationFlags& flags,
                          const PipelineConfig& cfg);

struct NovelSessionResult {
  RunState state;
  int k = 0;
  bool k_estimated = false;
  std::vector<std::int32_t> pseudo_labels;  // local cluster index per row
  std::optional<double> pseudo_label_acc;
};

// Unlabeled session. `novel` must carry no labels; `hidden_truth`, when
// given, is used only to extend the mapping for evaluation. Without `k` the
// class count is estimated from the stored calibration.
NovelSessionResult run_novel_session(RunState state, const EmbeddingSet& novel, std::optional<int> k,
                                     const AblationFlags& flags, const PipelineConfig& cfg,
                                     std::optional<std::span<const std::int32_t>> hidden_truth = std::nullopt);

// Test-time features live in the same normalized space as the memory.
Matrix to_feature_space(const Matrix& raw);

}  // namespace fccd::pipeline
