#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fccd/simd/kernels.hpp"

using namespace fccd::simd;

namespace {

std::vector<float> randv(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(-2.0f, 2.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double ref_dot(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

double abs_sum(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(static_cast<double>(a[i]) * b[i]);
  return s;
}

}  // namespace

TEST_CASE("scalar kernel is always available and active can be switched") {
  const auto isas = available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == Isa::scalar);
  const Isa before = active().isa;
  select(Isa::scalar);
  CHECK(active().isa == Isa::scalar);
  select(before);
  CHECK(active().isa == before);
  CHECK(isa_name(Isa::avx2) == "avx2");
}

TEST_CASE("every available kernel set agrees with a double-precision reference") {
  std::mt19937_64 rng(11);
  for (Isa isa : available_isas()) {
    const KernelTable* t = table_for(isa);
    REQUIRE(t != nullptr);
    for (std::size_t n : {0, 1, 3, 7, 8, 9, 15, 16, 17, 31, 33, 64, 100, 257}) {
      const auto a = randv(n, rng);
      const auto b = randv(n, rng);
      const double tol = 1e-5 * (abs_sum(a, b) + 1.0);
      CHECK(std::fabs(t->dot(a.data(), b.data(), n) - ref_dot(a, b)) <= tol);

      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) sq += (static_cast<double>(a[i]) - b[i]) * (static_cast<double>(a[i]) - b[i]);
      CHECK(std::fabs(t->squared_l2(a.data(), b.data(), n) - sq) <= 1e-5 * (sq + 1.0));

      auto y = b;
      t->axpy(0.5f, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(b[i] + 0.5f * a[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("vector kernels match scalar kernels within rounding") {
  std::mt19937_64 rng(5);
  const KernelTable* s = table_for(Isa::scalar);
  for (Isa isa : available_isas()) {
    if (isa == Isa::scalar) continue;
    const KernelTable* v = table_for(isa);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = static_cast<std::size_t>(rng() % 300);
      const auto a = randv(n, rng);
      const auto b = randv(n, rng);
      const double tol = 2e-6 * (abs_sum(a, b) + 1.0);
      CHECK(std::fabs(s->dot(a.data(), b.data(), n) - v->dot(a.data(), b.data(), n)) <= tol);
      const float ss = s->squared_l2(a.data(), b.data(), n);
      CHECK(std::fabs(ss - v->squared_l2(a.data(), b.data(), n)) <= 2e-6 * (ss + 1.0));
      auto y1 = b, y2 = b;
      s->axpy(-1.25f, a.data(), y1.data(), n);
      v->axpy(-1.25f, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-6f * (std::fabs(y1[i]) + 1.0f));
    }
  }
}
