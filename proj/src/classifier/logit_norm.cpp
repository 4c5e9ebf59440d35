#include "fccd/classifier/logit_norm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fccd/errors.hpp"

namespace fccd::classifier {
namespace {

// log(sum exp(z)) and softmax(z) together.
double log_softmax_into(std::span<const double> z, std::vector<double>& p) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  p.resize(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) {
    p[c] = std::exp(z[c] - zmax);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return zmax + std::log(sum);
}

void check_target(std::size_t classes, std::size_t target) {
  if (classes < 2) throw PreconditionError("loss needs at least 2 classes");
  if (target >= classes) {
    throw PreconditionError("target " + std::to_string(target) + " out of range for " + std::to_string(classes) +
                            " classes");
  }
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p;
  log_softmax_into(logits, p);
  return p;
}

LossAndGrad logit_norm_ce(std::span<const double> logits, std::size_t target, double tau) {
  check_target(logits.size(), target);
  if (!(tau > 0.0)) throw PreconditionError("tau must be positive");
  double norm_sq = 0.0;
  for (double h : logits) norm_sq += h * h;
  const double norm = std::sqrt(norm_sq);
  if (norm < 1e-12) throw NumericError("degenerate logits: norm below 1e-12, normalization undefined");

  const double scale = 1.0 / (tau * norm);
  std::vector<double> z(logits.size());
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = logits[c] * scale;

  LossAndGrad out;
  std::vector<double> p;
  out.loss = log_softmax_into(z, p) - z[target];

  // dL/dz = p - e_y; dz/dH = scale * (I - H H^T / |H|^2).
  p[target] -= 1.0;
  double proj = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) proj += logits[c] * p[c];
  proj /= norm_sq;
  out.grad.resize(p.size());
  for (std::size_t c = 0; c < p.size(); ++c) out.grad[c] = scale * (p[c] - logits[c] * proj);
  return out;
}

LossAndGrad cross_entropy(std::span<const double> logits, std::size_t target) {
  check_target(logits.size(), target);
  LossAndGrad out;
  out.loss = log_softmax_into(logits, out.grad) - logits[target];
  out.grad[target] -= 1.0;
  return out;
}

LossAndGrad soft_cross_entropy(std::span<const double> logits, std::span<const double> target,
                               double temperature) {
  if (logits.size() != target.size()) throw PreconditionError("soft target size mismatch");
  if (!(temperature > 0.0)) throw PreconditionError("temperature must be positive");
  std::vector<double> z(logits.size());
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = logits[c] / temperature;
  LossAndGrad out;
  std::vector<double> p;
  const double lse = log_softmax_into(z, p);
  double mass = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    out.loss -= target[c] * (z[c] - lse);
    mass += target[c];
  }
  out.grad.resize(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) out.grad[c] = (mass * p[c] - target[c]) / temperature;
  return out;
}

}  // namespace fccd::classifier
