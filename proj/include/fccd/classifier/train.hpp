#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fccd/classifier/linear_head.hpp"
#include "fccd/classifier/sinkhorn.hpp"
#include "fccd/matrix.hpp"

namespace fccd::classifier {

enum class LossKind { logit_norm, cross_entropy };

struct TrainConfig {
  double tau = 0.1;  // logit-norm temperature; softmax temperature for SeLa
  double lr0 = 0.1;  // decays to 0 along a cosine over all steps
  int epochs = 100;
  int batch_size = 128;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::logit_norm;
};

// Learning rate at `step` of `total_steps`: lr0 * (1 + cos(pi * step / total)) / 2.
double cosine_lr(double lr0, std::size_t step, std::size_t total_steps);

// Mini-batch SGD with momentum on the mean loss over shuffled batches.
// Features are expected L2-normalized. Deterministic for a given cfg.seed.
// Throws PreconditionError on out-of-range labels or a dimension mismatch.
LinearHead train_head(LinearHead head, const Matrix& features, std::span<const std::int32_t> labels,
                      const TrainConfig& cfg);

// Self-labeling baseline: each epoch computes softmax(logits / tau) for every
// feature, balances it into pseudo-labels with Sinkhorn-Knopp, then runs one
// pass of SGD on the soft cross-entropy against those pseudo-labels.
LinearHead train_head_sela(LinearHead head, const Matrix& features, const TrainConfig& cfg,
                           const SinkhornOptions& sinkhorn = {});

}  // namespace fccd::classifier
