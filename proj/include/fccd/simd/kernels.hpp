#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Float inner-loop kernels with one scalar reference and per-ISA variants.
// The active table is chosen at first use from the CPU features, and can be
// pinned with the FCCD_SIMD environment variable (scalar|avx2|neon) or
// simd::select().
namespace fccd::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  float (*dot)(const float* a, const float* b, std::size_t n);
  float (*squared_l2)(const float* a, const float* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
};

std::string_view isa_name(Isa isa);

// nullptr if the variant was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);

// Every variant usable on this machine, scalar first.
std::vector<Isa> available_isas();

const KernelTable& active();

// Throws std::invalid_argument if the variant is unavailable.
void select(Isa isa);

inline float dot(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline float squared_l2(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return active().squared_l2(a.data(), b.data(), a.size());
}

inline void axpy(float alpha, std::span<const float> x, std::span<float> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(FCCD_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(FCCD_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace fccd::simd
