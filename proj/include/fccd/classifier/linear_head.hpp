#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fccd/dataio/binary_io.hpp"
#include "fccd/matrix.hpp"

namespace fccd::classifier {

// Linear classification layer over every class seen so far.
struct LinearHead {
  Matrix weights;           // C x D
  std::vector<float> bias;  // C entries; all zero and frozen when !use_bias
  bool use_bias = true;

  std::size_t num_classes() const noexcept { return weights.rows(); }
  std::size_t dim() const noexcept { return weights.cols(); }

  // Weights drawn from U(-1/sqrt(D), 1/sqrt(D)), bias zero.
  static LinearHead create(std::size_t num_classes, std::size_t dim, std::uint64_t seed, bool use_bias = true);

  // Appends `extra` freshly initialized rows; existing rows are untouched.
  void extend(std::size_t extra, std::uint64_t seed);

  void logits(std::span<const float> x, std::span<float> out) const;
  bool all_finite() const;

  friend bool operator==(const LinearHead&, const LinearHead&) = default;
};

// Argmax of the logits per row; ties go to the lowest class index. Throws
// PreconditionError on a dimension mismatch.
std::vector<std::int32_t> predict(const LinearHead& head, const Matrix& features);

void encode_head(dataio::ByteWriter& w, const LinearHead& head);
LinearHead decode_head(dataio::ByteReader& r);

}  // namespace fccd::classifier
