#include "fccd/classifier/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fccd/classifier/logit_norm.hpp"
#include "fccd/errors.hpp"
#include "fccd/random.hpp"
#include "fccd/simd/kernels.hpp"

namespace fccd::classifier {
namespace {

void check_config(const LinearHead& head, const Matrix& features, const TrainConfig& cfg) {
  if (features.cols() != head.dim()) {
    throw PreconditionError("train: feature dimension " + std::to_string(features.cols()) +
                            " does not match head dimension " + std::to_string(head.dim()));
  }
  if (cfg.epochs < 0 || cfg.batch_size <= 0 || cfg.lr0 < 0.0 || !(cfg.tau > 0.0) || cfg.momentum < 0.0 ||
      cfg.momentum >= 1.0) {
    throw PreconditionError("train: invalid configuration");
  }
}

// SGD-with-momentum state plus the per-batch gradient buffers.
class SgdStep {
 public:
  explicit SgdStep(const LinearHead& head)
      : grad_w_(head.num_classes(), head.dim()),
        grad_b_(head.num_classes(), 0.0f),
        vel_w_(head.num_classes(), head.dim()),
        vel_b_(head.num_classes(), 0.0f) {}

  void zero() {
    std::fill(grad_w_.values().begin(), grad_w_.values().end(), 0.0f);
    std::fill(grad_b_.begin(), grad_b_.end(), 0.0f);
  }

  // Adds g (d loss / d logits) for input x.
  void accumulate(std::span<const double> g, std::span<const float> x) {
    for (std::size_t c = 0; c < g.size(); ++c) {
      const float gc = static_cast<float>(g[c]);
      simd::axpy(gc, x, grad_w_.row(c));
      grad_b_[c] += gc;
    }
  }

  void apply(LinearHead& head, double lr, double momentum, std::size_t batch) {
    const float inv = 1.0f / static_cast<float>(batch);
    const float mu = static_cast<float>(momentum);
    const float step = static_cast<float>(lr);
    auto vw = vel_w_.values();
    auto gw = grad_w_.values();
    auto w = head.weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      vw[i] = mu * vw[i] + gw[i] * inv;
      w[i] -= step * vw[i];
    }
    if (!head.use_bias) return;
    for (std::size_t c = 0; c < head.bias.size(); ++c) {
      vel_b_[c] = mu * vel_b_[c] + grad_b_[c] * inv;
      head.bias[c] -= step * vel_b_[c];
    }
  }

 private:
  Matrix grad_w_;
  std::vector<float> grad_b_;
  Matrix vel_w_;
  std::vector<float> vel_b_;
};

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {0x73687566, epoch}));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

double cosine_lr(double lr0, std::size_t step, std::size_t total_steps) {
  if (total_steps == 0) return lr0;
  const double t = static_cast<double>(step) / static_cast<double>(total_steps);
  return 0.5 * lr0 * (1.0 + std::cos(std::numbers::pi * t));
}

LinearHead train_head(LinearHead head, const Matrix& features, std::span<const std::int32_t> labels,
                      const TrainConfig& cfg) {
  check_config(head, features, cfg);
  if (labels.size() != features.rows()) throw PreconditionError("train: label count mismatch");
  for (std::int32_t y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= head.num_classes()) {
      throw PreconditionError("train: label " + std::to_string(y) + " out of range for " +
                              std::to_string(head.num_classes()) + " classes");
    }
  }
  if (cfg.epochs == 0 || features.rows() == 0) return head;

  const std::size_t n = features.rows();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t per_epoch = (n + batch - 1) / batch;
  const std::size_t total = per_epoch * static_cast<std::size_t>(cfg.epochs);

  SgdStep sgd(head);
  std::vector<float> zf(head.num_classes());
  std::vector<double> z(head.num_classes());
  std::size_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = shuffled(n, cfg.seed, static_cast<std::uint64_t>(epoch));
    for (std::size_t start = 0; start < n; start += batch, ++step) {
      const std::size_t end = std::min(n, start + batch);
      sgd.zero();
      for (std::size_t b = start; b < end; ++b) {
        const auto x = features.row(order[b]);
        head.logits(x, zf);
        std::copy(zf.begin(), zf.end(), z.begin());
        const auto y = static_cast<std::size_t>(labels[order[b]]);
        const auto lg = cfg.loss == LossKind::logit_norm ? logit_norm_ce(z, y, cfg.tau) : cross_entropy(z, y);
        sgd.accumulate(lg.grad, x);
      }
      sgd.apply(head, cosine_lr(cfg.lr0, step, total), cfg.momentum, end - start);
    }
  }
  if (!head.all_finite()) throw NumericError("train: parameters diverged to non-finite values");
  return head;
}

LinearHead train_head_sela(LinearHead head, const Matrix& features, const TrainConfig& cfg,
                           const SinkhornOptions& sinkhorn) {
  check_config(head, features, cfg);
  if (cfg.epochs == 0 || features.rows() == 0) return head;

  const std::size_t n = features.rows();
  const std::size_t k = head.num_classes();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t per_epoch = (n + batch - 1) / batch;
  const std::size_t total = per_epoch * static_cast<std::size_t>(cfg.epochs);

  SgdStep sgd(head);
  std::vector<float> zf(k);
  std::vector<double> z(k);
  std::vector<double> probs(n * k);
  std::size_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) {
      head.logits(features.row(i), zf);
      for (std::size_t c = 0; c < k; ++c) z[c] = zf[c] / cfg.tau;
      const auto p = softmax(z);
      std::copy(p.begin(), p.end(), probs.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    TransportPlan plan;
    try {
      plan = sinkhorn_pseudolabels(probs, n, k, sinkhorn);
    } catch (const SinkhornNotConverged& e) {
      plan = e.last();
    }
    // Rows of the plan sum to 1/n; rescale to per-sample distributions.
    for (double& v : plan.q) v *= static_cast<double>(n);

    const auto order = shuffled(n, cfg.seed, static_cast<std::uint64_t>(epoch));
    for (std::size_t start = 0; start < n; start += batch, ++step) {
      const std::size_t end = std::min(n, start + batch);
      sgd.zero();
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto x = features.row(i);
        head.logits(x, zf);
        std::copy(zf.begin(), zf.end(), z.begin());
        const auto lg = soft_cross_entropy(z, std::span(plan.q).subspan(i * k, k), cfg.tau);
        sgd.accumulate(lg.grad, x);
      }
      sgd.apply(head, cosine_lr(cfg.lr0, step, total), cfg.momentum, end - start);
    }
  }
  if (!head.all_finite()) throw NumericError("train_sela: parameters diverged to non-finite values");
  return head;
}

}  // namespace fccd::classifier
