#include "fccd/classifier/linear_head.hpp"

#include <cmath>
#include <random>
#include <string>

#include "fccd/errors.hpp"
#include "fccd/random.hpp"
#include "fccd/simd/kernels.hpp"

namespace fccd::classifier {
namespace {

void init_rows(Matrix& w, std::size_t first, std::uint64_t seed) {
  Rng rng(seed);
  const float bound = 1.0f / std::sqrt(static_cast<float>(w.cols()));
  std::uniform_real_distribution<float> uniform(-bound, bound);
  for (std::size_t r = first; r < w.rows(); ++r) {
    for (float& v : w.row(r)) v = uniform(rng);
  }
}

}  // namespace

LinearHead LinearHead::create(std::size_t num_classes, std::size_t dim, std::uint64_t seed, bool use_bias) {
  if (num_classes == 0 || dim == 0) throw PreconditionError("linear head needs at least one class and dimension");
  LinearHead head;
  head.weights = Matrix(num_classes, dim);
  head.bias.assign(num_classes, 0.0f);
  head.use_bias = use_bias;
  init_rows(head.weights, 0, derive_seed(seed, {0x68656164}));
  return head;
}

void LinearHead::extend(std::size_t extra, std::uint64_t seed) {
  if (extra == 0) return;
  const std::size_t old = num_classes();
  Matrix grown(old + extra, dim());
  std::copy(weights.values().begin(), weights.values().end(), grown.values().begin());
  init_rows(grown, old, derive_seed(seed, {0x68656164, old}));
  weights = std::move(grown);
  bias.resize(old + extra, 0.0f);
}

void LinearHead::logits(std::span<const float> x, std::span<float> out) const {
  for (std::size_t c = 0; c < num_classes(); ++c) out[c] = simd::dot(weights.row(c), x) + bias[c];
}

bool LinearHead::all_finite() const {
  for (float v : weights.values()) {
    if (!std::isfinite(v)) return false;
  }
  for (float v : bias) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::vector<std::int32_t> predict(const LinearHead& head, const Matrix& features) {
  if (features.cols() != head.dim()) {
    throw PreconditionError("predict: feature dimension " + std::to_string(features.cols()) +
                            " does not match head dimension " + std::to_string(head.dim()));
  }
  std::vector<std::int32_t> out(features.rows());
  std::vector<float> z(head.num_classes());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    head.logits(features.row(i), z);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
      if (z[c] > z[best]) best = c;
    }
    out[i] = static_cast<std::int32_t>(best);
  }
  return out;
}

void encode_head(dataio::ByteWriter& w, const LinearHead& head) {
  w.put_u64(head.num_classes());
  w.put_u32(static_cast<std::uint32_t>(head.dim()));
  w.put_u16(head.use_bias ? 1 : 0);
  for (float v : head.weights.values()) w.put_f32(v);
  for (float v : head.bias) w.put_f32(v);
}

LinearHead decode_head(dataio::ByteReader& r) {
  LinearHead head;
  const std::uint64_t classes = r.get_u64();
  const std::uint32_t dim = r.get_u32();
  const std::size_t flag_at = r.offset();
  const std::uint16_t flag = r.get_u16();
  if (flag > 1) throw FormatError("head: bad bias flag", flag_at);
  head.use_bias = flag == 1;
  if (classes > r.remaining() / 4) throw FormatError("head: declared size exceeds input", flag_at);
  head.weights = Matrix(static_cast<std::size_t>(classes), dim);
  for (float& v : head.weights.values()) v = r.get_f32();
  head.bias.resize(static_cast<std::size_t>(classes));
  for (float& v : head.bias) v = r.get_f32();
  if (!head.all_finite()) throw FormatError("head: non-finite parameter", r.offset());
  return head;
}

}  // namespace fccd::classifier
