#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fccd::classifier {

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logits
};

// Cross-entropy of softmax(H / (tau * |H|)) at `target`, where |H| is the
// Euclidean norm of the whole logit vector. The gradient includes the
// dependence of |H| on H. Throws NumericError if |H| < 1e-12 and
// PreconditionError unless C >= 2, target < C and tau > 0.
LossAndGrad logit_norm_ce(std::span<const double> logits, std::size_t target, double tau);

// Plain softmax cross-entropy at `target`.
LossAndGrad cross_entropy(std::span<const double> logits, std::size_t target);

// -sum_c q_c log softmax(H / temperature)_c against a target distribution q.
LossAndGrad soft_cross_entropy(std::span<const double> logits, std::span<const double> target,
                               double temperature);

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

}  // namespace fccd::classifier
