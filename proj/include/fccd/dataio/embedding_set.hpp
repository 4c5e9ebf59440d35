#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fccd/matrix.hpp"

namespace fccd {

// Label value reserved for rows without ground truth inside a labeled file.
inline constexpr std::int32_t kUnlabeled = -1;

// N x D feature matrix plus optional per-row ground-truth class IDs.
struct EmbeddingSet {
  Matrix data;
  std::optional<std::vector<std::int32_t>> labels;

  std::size_t count() const noexcept { return data.rows(); }
  std::size_t dim() const noexcept { return data.cols(); }
  bool has_labels() const noexcept { return labels.has_value(); }

  // Throws PreconditionError when N or D is zero, a value is non-finite,
  // or labels are mis-sized / below kUnlabeled.
  void validate() const;

  // Copy with the label block dropped; what discovery code is allowed to see.
  EmbeddingSet without_labels() const;

  // Sorted distinct labels, excluding kUnlabeled. Empty when unlabeled.
  std::vector<std::int32_t> distinct_labels() const;

  EmbeddingSet select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;
};

// Scales every row to unit Euclidean norm; all-zero rows are left unchanged.
void l2_normalize_rows(Matrix& m);
Matrix l2_normalized(const Matrix& m);

}  // namespace fccd
