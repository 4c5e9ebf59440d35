#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fccd/classifier/baselines.hpp"
#include "fccd/classifier/linear_head.hpp"
#include "fccd/classifier/logit_norm.hpp"
#include "fccd/classifier/sinkhorn.hpp"
#include "fccd/classifier/train.hpp"
#include "fccd/dataio/binary_io.hpp"
#include "fccd/errors.hpp"
#include "fccd/eval/mapping.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fccd;
using namespace fccd::classifier;

namespace {

std::vector<double> random_logits(std::mt19937_64& rng, std::size_t c) {
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<double> h(c);
  for (auto& v : h) v = n(rng);
  return h;
}

double accuracy(const std::vector<std::int32_t>& p, const std::vector<std::int32_t>& y) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < p.size(); ++i) ok += p[i] == y[i];
  return 100.0 * static_cast<double>(ok) / static_cast<double>(p.size());
}

memory::ClusterGaussian iso(std::int32_t id, std::vector<double> mean, double var) {
  memory::ClusterGaussian g;
  g.class_id = id;
  g.mode = memory::CovarianceMode::diagonal;
  g.covariance.assign(mean.size(), var);
  g.mean = std::move(mean);
  g.count = 1;
  return g;
}

}  // namespace

TEST_CASE("logit-norm loss: hand-evaluated value for H = (2, 1)") {
  const std::vector<double> h{2.0, 1.0};
  const auto r = logit_norm_ce(h, 0, 0.1);
  // ln(1 + exp(-1 / (0.1 * sqrt 5))), evaluated at 40 digits.
  CHECK(r.loss == doctest::Approx(0.01135814238514680972).epsilon(1e-12));
  CHECK(r.loss == doctest::Approx(static_cast<double>(oracle::logit_norm_loss(h, 0, 0.1))).epsilon(1e-12));
}

TEST_CASE("logit-norm loss: constant logits give ln C") {
  for (double a : {-3.0, 1e-3, 1.0, 250.0}) {
    for (std::size_t c : {2, 5, 17}) {
      const std::vector<double> h(c, a);
      CHECK(std::fabs(logit_norm_ce(h, 0, 0.1).loss - std::log(static_cast<double>(c))) < 1e-12);
      CHECK(std::fabs(logit_norm_ce(h, c - 1, 2.5).loss - std::log(static_cast<double>(c))) < 1e-12);
    }
  }
}

TEST_CASE("logit-norm loss: scale invariance and finite-difference gradient") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> tau_dist(0.05, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 2 + rng() % 9;
    const auto h = random_logits(rng, c);
    const std::size_t y = rng() % c;
    const double tau = tau_dist(rng);
    const auto base = logit_norm_ce(h, y, tau);
    for (double s : {0.1, 3.0, 100.0}) {
      std::vector<double> scaled(h);
      for (auto& v : scaled) v *= s;
      CHECK(std::fabs(logit_norm_ce(scaled, y, tau).loss - base.loss) < 1e-9);
    }
    const auto fd = oracle::central_difference([&](const std::vector<double>& x) { return oracle::logit_norm_loss(x, y, tau); },
                                               h, 1e-5);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      num += (base.grad[i] - fd[i]) * (base.grad[i] - fd[i]);
      den += fd[i] * fd[i];
    }
    CHECK(std::sqrt(num) <= 1e-4 * std::max(std::sqrt(den), 1e-8));
  }
}

TEST_CASE("logit-norm loss errors") {
  CHECK_THROWS_AS(logit_norm_ce(std::vector<double>{0.0, 0.0}, 0, 0.1), NumericError);
  CHECK_THROWS_AS(logit_norm_ce(std::vector<double>{1.0}, 0, 0.1), PreconditionError);
  CHECK_THROWS_AS(logit_norm_ce(std::vector<double>{1.0, 2.0}, 2, 0.1), PreconditionError);
}

TEST_CASE("softmax sums to one and plain cross-entropy gradient is p - e_y") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_logits(rng, 6);
    const auto p = softmax(h);
    CHECK(std::fabs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-9);
    const auto ce = cross_entropy(h, 2);
    CHECK(ce.loss == doctest::Approx(-std::log(p[2])));
    for (std::size_t i = 0; i < 6; ++i) CHECK(ce.grad[i] == doctest::Approx(p[i] - (i == 2 ? 1.0 : 0.0)));
  }
}

TEST_CASE("soft cross-entropy gradient matches finite differences") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto h = random_logits(rng, 4);
    auto q = softmax(random_logits(rng, 4));
    const double t = 0.1 + (rng() % 10) / 10.0;
    const auto r = soft_cross_entropy(h, q, t);
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& x) {
          std::vector<long double> z(x.size());
          long double mx = -1e300L, s = 0.0L;
          for (std::size_t i = 0; i < x.size(); ++i) mx = std::max(mx, z[i] = x[i] / t);
          for (auto v : z) s += std::exp(v - mx);
          long double loss = 0.0L;
          for (std::size_t i = 0; i < x.size(); ++i) loss -= q[i] * (z[i] - mx - std::log(s));
          return loss;
        },
        h, 1e-5);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r.grad[i] == doctest::Approx(fd[i]).epsilon(1e-4));
  }
}

TEST_CASE("predict: identity head, ties, rescaling and brute-force argmax") {
  LinearHead h = LinearHead::create(3, 3, 0, false);
  h.weights = Matrix(3, 3, std::vector<float>{1, 0, 0, 0, 1, 0, 0, 0, 1});
  Matrix e(3, 3, std::vector<float>{0, 0, 1, 1, 0, 0, 0, 1, 0});
  CHECK(predict(h, e) == std::vector<std::int32_t>{2, 0, 1});
  Matrix tie(1, 3, std::vector<float>{1, 1, 0});
  CHECK(predict(h, tie) == std::vector<std::int32_t>{0});

  std::mt19937_64 rng(4);
  LinearHead r = LinearHead::create(7, 5, 9, false);
  const Matrix x = testutil::random_matrix(200, 5, 12);
  const auto p = predict(r, x);
  Matrix scaled = x;
  for (float& v : scaled.values()) v *= 3.5f;
  CHECK(predict(r, scaled) == p);

  LinearHead rb = LinearHead::create(7, 5, 10, true);
  std::normal_distribution<float> n(0.f, 1.f);
  for (float& b : rb.bias) b = n(rng);
  const auto pb = predict(rb, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    double bv = -1e300;
    for (std::size_t c = 0; c < 7; ++c) {
      double z = rb.bias[c];
      for (std::size_t d = 0; d < 5; ++d) z += static_cast<double>(rb.weights(c, d)) * x(i, d);
      if (z > bv) {
        bv = z;
        best = c;
      }
    }
    CHECK(pb[i] == static_cast<std::int32_t>(best));
  }
  CHECK_THROWS_AS(predict(rb, Matrix(1, 4)), PreconditionError);
}

TEST_CASE("extending the head keeps old logits") {
  LinearHead h = LinearHead::create(4, 6, 1);
  h.bias = {0.1f, -0.2f, 0.3f, 0.0f};
  const Matrix x = testutil::random_matrix(10, 6, 2);
  std::vector<float> before(4), after(9);
  LinearHead g = h;
  g.extend(5, 3);
  CHECK(g.num_classes() == 9);
  for (std::size_t i = 0; i < 10; ++i) {
    h.logits(x.row(i), before);
    g.logits(x.row(i), after);
    for (std::size_t c = 0; c < 4; ++c) CHECK(after[c] == before[c]);
  }
  CHECK(g.all_finite());
}

TEST_CASE("training: separable 2-class set reaches 100%, zero epochs is identity, reruns are identical") {
  auto s = testutil::blobs(2, 100, 2, 8.0, 5);
  l2_normalize_rows(s.data);
  TrainConfig cfg;
  cfg.seed = 3;
  const auto h0 = LinearHead::create(2, 2, 1);
  const auto h = train_head(h0, s.data, *s.labels, cfg);
  CHECK(accuracy(predict(h, s.data), *s.labels) == 100.0);
  CHECK(train_head(h0, s.data, *s.labels, cfg) == h);

  TrainConfig none = cfg;
  none.epochs = 0;
  CHECK(train_head(h0, s.data, *s.labels, none) == h0);

  TrainConfig ce = cfg;
  ce.loss = LossKind::cross_entropy;
  CHECK(accuracy(predict(train_head(h0, s.data, *s.labels, ce), s.data), *s.labels) == 100.0);

  std::vector<std::int32_t> bad(*s.labels);
  bad[0] = 2;
  CHECK_THROWS_AS(train_head(h0, s.data, bad, cfg), PreconditionError);
}

TEST_CASE("cosine schedule endpoints") {
  CHECK(cosine_lr(0.1, 0, 100) == doctest::Approx(0.1));
  CHECK(cosine_lr(0.1, 50, 100) == doctest::Approx(0.05));
  CHECK(cosine_lr(0.1, 100, 100) == doctest::Approx(0.0));
}

TEST_CASE("NCM and Mahalanobis baselines") {
  memory::GaussianMemory m;
  m.append({iso(0, {1, 0}, 1.0), iso(1, {0, 1}, 1.0), iso(2, {-1, 0}, 1.0)});
  Matrix q(4, 2, std::vector<float>{1, 0, 0, 1, -1, 0, 0.70710678f, 0.70710678f});
  CHECK(ncm_predict(m, q) == std::vector<std::int32_t>{0, 1, 2, 0});
  CHECK(mahalanobis_predict(m, q) == ncm_predict(m, q));

  const Matrix x = testutil::random_matrix(300, 2, 8);
  const auto p = ncm_predict(m, x);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double best = 1e300;
    std::int32_t arg = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      double d = 0.0;
      for (std::size_t k = 0; k < 2; ++k) d += (x(i, k) - m[c].mean[k]) * (x(i, k) - m[c].mean[k]);
      if (d < best) {
        best = d;
        arg = static_cast<std::int32_t>(c);
      }
    }
    CHECK(p[i] == arg);
  }
  CHECK(mahalanobis_predict(m, x) == p);

  memory::GaussianMemory f;
  auto a = iso(0, {0, 0}, 1.0);
  a.covariance = {1.0, 100.0};
  f.append({a, iso(1, {3, 0}, 1.0)});
  Matrix at(1, 2, std::vector<float>{2, 0});
  CHECK(mahalanobis_predict(f, at) == std::vector<std::int32_t>{1});
  Matrix mu(1, 2, std::vector<float>{3, 0});
  CHECK(mahalanobis_predict(f, mu) == std::vector<std::int32_t>{1});
}

TEST_CASE("Sinkhorn: uniform fixed point and the 2x2 example") {
  const std::vector<double> uniform(6 * 3, 1.0 / 3.0);
  const auto u = sinkhorn_pseudolabels(uniform, 6, 3);
  for (double v : u.q) CHECK(v == doctest::Approx(1.0 / 18.0));

  const std::vector<double> p{0.9, 0.1, 0.1, 0.9};
  const auto q = sinkhorn_pseudolabels(p, 2, 2);
  // P is symmetric with equal row sums, so the balanced plan is P / 2.
  CHECK(q(0, 0) == doctest::Approx(0.45).epsilon(1e-6));
  CHECK(q(0, 1) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(q(0, 0) + q(0, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(q(0, 0) + q(1, 0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("Sinkhorn marginals on random matrices and non-convergence reporting") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng() % 7;
    const std::size_t b = k + rng() % (65 - k);
    std::vector<double> p(b * k);
    for (auto& v : p) v = u(rng);
    const auto q = sinkhorn_pseudolabels(p, b, k);
    CHECK(marginal_error(q) < 1e-6);
  }
  std::vector<double> skew(8 * 2);
  for (std::size_t i = 0; i < 8; ++i) {
    skew[i * 2] = 1.0;
    skew[i * 2 + 1] = 1e-6 * static_cast<double>(i + 1);
  }
  SinkhornOptions tight{1, 1e-12};
  try {
    sinkhorn_pseudolabels(skew, 8, 2, tight);
    FAIL("expected non-convergence");
  } catch (const SinkhornNotConverged& e) {
    CHECK(e.achieved_error() > 1e-12);
    CHECK(e.last().q.size() == 16);
  }
  CHECK_THROWS_AS(sinkhorn_pseudolabels(std::vector<double>(6, 1.0), 2, 3), PreconditionError);
}

TEST_CASE("SeLa head recovers two well-separated clusters") {
  auto s = testutil::blobs(2, 100, 4, 12.0, 17);
  l2_normalize_rows(s.data);
  TrainConfig cfg;
  cfg.seed = 2;
  cfg.epochs = 30;
  const auto h = train_head_sela(LinearHead::create(2, 4, 5), s.data, cfg);
  const auto p = predict(h, s.data);
  CHECK(eval::match_clusters(p, 2, *s.labels).accuracy() == 100.0);

  TrainConfig frozen = cfg;
  frozen.lr0 = 0.0;
  frozen.epochs = 1;
  const auto h0 = LinearHead::create(2, 4, 5);
  CHECK(train_head_sela(h0, s.data, frozen) == h0);
}

TEST_CASE("head serialization round trips") {
  auto h = LinearHead::create(3, 4, 8);
  h.bias = {1.f, 2.f, 3.f};
  dataio::ByteWriter w;
  encode_head(w, h);
  dataio::ByteReader r(w.bytes());
  CHECK(decode_head(r) == h);
}
