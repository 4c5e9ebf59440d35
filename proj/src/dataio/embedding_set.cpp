#include "fccd/dataio/embedding_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fccd/errors.hpp"
#include "fccd/simd/kernels.hpp"

namespace fccd {

void EmbeddingSet::validate() const {
  if (count() == 0 || dim() == 0) throw PreconditionError("embedding set must have N >= 1 and D >= 1");
  for (float v : data.values()) {
    if (!std::isfinite(v)) throw PreconditionError("embedding set contains a non-finite value");
  }
  if (labels) {
    if (labels->size() != count()) {
      throw PreconditionError("label count " + std::to_string(labels->size()) +
                              " does not match row count " + std::to_string(count()));
    }
    for (std::int32_t l : *labels) {
      if (l < kUnlabeled) throw PreconditionError("label below -1: " + std::to_string(l));
    }
  }
}

EmbeddingSet EmbeddingSet::without_labels() const { return EmbeddingSet{data, std::nullopt}; }

std::vector<std::int32_t> EmbeddingSet::distinct_labels() const {
  if (!labels) return {};
  std::vector<std::int32_t> out;
  for (std::int32_t l : *labels) {
    if (l != kUnlabeled) out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EmbeddingSet EmbeddingSet::select_rows(std::span<const std::size_t> rows) const {
  EmbeddingSet out;
  out.data = Matrix(rows.size(), dim());
  if (labels) out.labels.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = data.row(rows[i]);
    std::copy(src.begin(), src.end(), out.data.row(i).begin());
    if (labels) out.labels->push_back((*labels)[rows[i]]);
  }
  return out;
}

void l2_normalize_rows(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    const float norm = std::sqrt(simd::dot(r, r));
    if (norm > 0.0f) {
      const float inv = 1.0f / norm;
      for (float& v : r) v *= inv;
    }
  }
}

Matrix l2_normalized(const Matrix& m) {
  Matrix out = m;
  l2_normalize_rows(out);
  return out;
}

}  // namespace fccd
