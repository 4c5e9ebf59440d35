#include <doctest.h>

#include <cmath>
#include <random>

#include "fccd/dataio/binary_io.hpp"
#include "fccd/errors.hpp"
#include "fccd/memory/gaussian_memory.hpp"
#include "fccd/memory/replay.hpp"
#include "test_util.hpp"

using namespace fccd;
using namespace fccd::memory;

namespace {

ClusterGaussian diag_gaussian(std::int32_t id, std::vector<double> mean, std::vector<double> var) {
  ClusterGaussian g;
  g.class_id = id;
  g.mean = std::move(mean);
  g.mode = CovarianceMode::diagonal;
  g.covariance = std::move(var);
  g.count = 10;
  return g;
}

}  // namespace

TEST_CASE("single-point cluster: mean is the point, covariance is the floor") {
  Matrix x(1, 3, std::vector<float>{1.f, -2.f, 0.5f});
  const std::vector<std::int32_t> a{0};
  const auto g = fit_gaussians(x, a, 4, 1);
  REQUIRE(g.size() == 1);
  CHECK(g[0].class_id == 4);
  CHECK(g[0].session == 1);
  CHECK(g[0].mean == std::vector<double>{1.0, -2.0, 0.5});
  for (std::size_t d = 0; d < 3; ++d) CHECK(g[0].variance(d) == doctest::Approx(1e-4));
}

TEST_CASE("four-point square: unbiased covariance diag(4/3, 4/3) before shrinkage") {
  Matrix x(4, 2, std::vector<float>{0, 0, 0, 2, 2, 0, 2, 2});
  const std::vector<std::int32_t> a{0, 0, 0, 0};
  GaussianOptions raw{0.0, 0.0};
  const auto g = fit_gaussians(x, a, 0, 0, raw);
  CHECK(g[0].mode == CovarianceMode::full);
  CHECK(g[0].mean == std::vector<double>{1.0, 1.0});
  CHECK(g[0].covariance[0] == doctest::Approx(4.0 / 3.0));
  CHECK(g[0].covariance[3] == doctest::Approx(4.0 / 3.0));
  CHECK(g[0].covariance[1] == doctest::Approx(0.0));

  const auto shrunk = fit_gaussians(x, a, 0, 0);
  CHECK(shrunk[0].covariance[0] == doctest::Approx(4.0 / 3.0 + 1e-4));
}

TEST_CASE("shrinkage pulls off-diagonals toward zero and keeps the floor") {
  Matrix x(3, 2, std::vector<float>{0, 0, 1, 1, 2, 2.5f});
  const std::vector<std::int32_t> a{0, 0, 0};
  const auto raw = fit_gaussians(x, a, 0, 0, {0.0, 0.0});
  const auto g = fit_gaussians(x, a, 0, 0, {0.1, 1e-4});
  CHECK(g[0].covariance[1] == doctest::Approx(0.9 * raw[0].covariance[1]));
  CHECK(g[0].covariance[1] == g[0].covariance[2]);
  CHECK(g[0].covariance[0] == doctest::Approx(raw[0].covariance[0] + 1e-4));
  CHECK_NOTHROW(cholesky_lower(g[0]));
}

TEST_CASE("clusters are fitted independently") {
  Matrix x(4, 1, std::vector<float>{0, 2, 100, 104});
  const auto g = fit_gaussians(x, std::vector<std::int32_t>{0, 0, 1, 1}, 0, 0);
  const auto solo = fit_gaussians(Matrix(2, 1, std::vector<float>{0, 2}), std::vector<std::int32_t>{0, 0}, 0, 0);
  CHECK(g[0] == solo[0]);
  CHECK(g[1].mean[0] == doctest::Approx(102.0));
}

TEST_CASE("fewer points than dimensions falls back to a diagonal covariance") {
  const Matrix x = testutil::random_matrix(5, 8, 1);
  const auto g = fit_gaussians(x, std::vector<std::int32_t>(5, 0), 0, 0);
  CHECK(g[0].mode == CovarianceMode::diagonal);
  CHECK(g[0].covariance.size() == 8);
}

TEST_CASE("fit_gaussians rejects empty clusters") {
  const Matrix x = testutil::random_matrix(3, 2, 1);
  CHECK_THROWS_AS(fit_gaussians(x, std::vector<std::int32_t>{0, 2, 2}, 0, 0), PreconditionError);
}

TEST_CASE("memory append requires contiguous ids") {
  GaussianMemory m;
  m.append({diag_gaussian(0, {0, 0}, {1, 1}), diag_gaussian(1, {1, 1}, {1, 1})});
  CHECK(m.size() == 2);
  CHECK_THROWS_AS(m.append({diag_gaussian(3, {0, 0}, {1, 1})}), PreconditionError);
  CHECK_THROWS_AS(m.append({diag_gaussian(2, {0, 0, 0}, {1, 1, 1})}), PreconditionError);
}

TEST_CASE("replay count contract and near-deterministic samples") {
  GaussianMemory m;
  m.append({diag_gaussian(0, {0, 0}, {1e-4, 1e-4}), diag_gaussian(1, {5, 5}, {1, 1}),
            diag_gaussian(2, {-5, 5}, {1, 1})});
  const auto r = sample_replay(m, 256, 3);
  CHECK(r.features.rows() == 768);
  std::vector<int> counts(3, 0);
  for (auto l : r.labels) ++counts[static_cast<std::size_t>(l)];
  CHECK(counts == std::vector<int>{256, 256, 256});

  const auto five = sample_replay(m, 5, 9);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(five.labels[i] == 0);
    for (std::size_t d = 0; d < 2; ++d) CHECK(std::fabs(five.features(i, d)) < 3.0 * std::sqrt(1e-4) * 2.0);
  }
}

TEST_CASE("replay moments: diag(1, 4) with 10000 draws") {
  GaussianMemory m;
  m.append({diag_gaussian(0, {0, 0}, {1, 4})});
  const auto r = sample_replay(m, 10000, 2024);
  double mean[2] = {0, 0}, var[2] = {0, 0};
  for (std::size_t i = 0; i < 10000; ++i)
    for (std::size_t d = 0; d < 2; ++d) mean[d] += r.features(i, d);
  for (double& v : mean) v /= 10000.0;
  for (std::size_t i = 0; i < 10000; ++i)
    for (std::size_t d = 0; d < 2; ++d) var[d] += (r.features(i, d) - mean[d]) * (r.features(i, d) - mean[d]);
  for (double& v : var) v /= 9999.0;
  CHECK(std::fabs(mean[0]) < 3.0 * 1.0 / 100.0);
  CHECK(std::fabs(mean[1]) < 3.0 * 2.0 / 100.0);
  CHECK(var[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(var[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("fit then sample reproduces a correlated Gaussian") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(20000, 2);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double a = n(rng), b = n(rng);
    x(i, 0) = static_cast<float>(1.0 + a);
    x(i, 1) = static_cast<float>(-2.0 + 0.8 * a + 0.6 * b);
  }
  const auto g = fit_gaussians(x, std::vector<std::int32_t>(x.rows(), 0), 0, 0, {0.0, 0.0});
  CHECK(g[0].mean[0] == doctest::Approx(1.0).epsilon(0.03));
  CHECK(g[0].mean[1] == doctest::Approx(-2.0).epsilon(0.03));
  CHECK(g[0].covariance[1] == doctest::Approx(0.8).epsilon(0.05));
  GaussianMemory m;
  m.append(g);
  const auto r = sample_replay(m, 20000, 6);
  double cov = 0.0, m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < r.features.rows(); ++i) {
    m0 += r.features(i, 0);
    m1 += r.features(i, 1);
  }
  m0 /= 20000.0;
  m1 /= 20000.0;
  for (std::size_t i = 0; i < r.features.rows(); ++i) cov += (r.features(i, 0) - m0) * (r.features(i, 1) - m1);
  cov /= 19999.0;
  CHECK(m0 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(cov == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("replay streams are per class, independent of entry order") {
  GaussianMemory a;
  a.append({diag_gaussian(0, {0, 0}, {1, 1}), diag_gaussian(1, {3, 3}, {2, 2})});
  GaussianMemory b;
  b.append({diag_gaussian(0, {0, 0}, {1, 1})});
  const auto ra = sample_replay(a, 7, 11);
  const auto rb = sample_replay(b, 7, 11);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t d = 0; d < 2; ++d) CHECK(ra.features(i, d) == rb.features(i, d));
  CHECK(sample_replay(a, 7, 11).features == ra.features);
}

TEST_CASE("non positive-definite covariance fails factorization") {
  ClusterGaussian g;
  g.mean = {0, 0};
  g.covariance = {1, 2, 2, 1};
  CHECK_THROWS_AS(cholesky_lower(g), NumericError);
}

TEST_CASE("mahalanobis distance through the Cholesky factor") {
  const auto g = diag_gaussian(0, {0, 0}, {1, 100});
  const auto l = cholesky_lower(g);
  const std::vector<float> x{2.f, 10.f};
  CHECK(mahalanobis_squared(l, g.mean, x) == doctest::Approx(4.0 + 1.0));
}

TEST_CASE("memory serialization round trips") {
  const auto x = testutil::random_matrix(60, 4, 3);
  std::vector<std::int32_t> a(60);
  for (std::size_t i = 0; i < 60; ++i) a[i] = static_cast<std::int32_t>(i % 3);
  GaussianMemory m;
  m.append(fit_gaussians(x, a, 0, 0));
  m.append(fit_gaussians(Matrix(2, 4, 1.0f), std::vector<std::int32_t>{0, 0}, 3, 1));
  dataio::ByteWriter w;
  encode_memory(w, m);
  dataio::ByteReader r(w.bytes());
  CHECK(decode_memory(r) == m);
  r.expect_end();
}
