#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fccd/dataio/binary_io.hpp"
#include "fccd/matrix.hpp"

namespace fccd::memory {

enum class CovarianceMode : std::uint8_t { full = 0, diagonal = 1 };

// One discovered (or labeled) class summarized as a Gaussian. Only these
// statistics survive a session; the raw embeddings do not.
struct ClusterGaussian {
  std::int32_t class_id = 0;  // global head index
  std::vector<double> mean;
  CovarianceMode mode = CovarianceMode::full;
  std::vector<double> covariance;  // D*D row-major (full) or D (diagonal)
  std::uint64_t count = 0;
  std::int32_t session = 0;

  std::size_t dim() const noexcept { return mean.size(); }
  double variance(std::size_t d) const noexcept {
    return mode == CovarianceMode::full ? covariance[d * dim() + d] : covariance[d];
  }

  friend bool operator==(const ClusterGaussian&, const ClusterGaussian&) = default;
};

struct GaussianOptions {
  double shrinkage = 0.1;        // weight pulled toward the diagonal
  double variance_floor = 1e-4;  // added to every variance
};

// Append-only: class_ids are 0..size()-1 in order.
class GaussianMemory {
 public:
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t dim() const noexcept { return entries_.empty() ? 0 : entries_.front().dim(); }
  const std::vector<ClusterGaussian>& entries() const noexcept { return entries_; }
  const ClusterGaussian& operator[](std::size_t i) const { return entries_[i]; }

  // Throws PreconditionError if ids do not continue the sequence or dims differ.
  void append(std::vector<ClusterGaussian> fresh);

  friend bool operator==(const GaussianMemory&, const GaussianMemory&) = default;

 private:
  std::vector<ClusterGaussian> entries_;
};

// Per-cluster sample mean and unbiased covariance, shrunk as
//   S <- (1 - shrinkage) S + shrinkage diag(S) + variance_floor I.
// Clusters with fewer points than dimensions keep only the diagonal.
// `assignment` must cover [0, K) with no empty cluster.
std::vector<ClusterGaussian> fit_gaussians(const Matrix& data, std::span<const std::int32_t> assignment,
                                           std::int32_t id_offset, std::int32_t session,
                                           const GaussianOptions& options = {});

// Lower Cholesky factor (D*D row-major; diagonal mode gives a diagonal
// matrix). Throws NumericError if the covariance is not positive definite.
std::vector<double> cholesky_lower(const ClusterGaussian& g);

// (x - mu)^T S^-1 (x - mu) given the factor from cholesky_lower.
double mahalanobis_squared(std::span<const double> lower, std::span<const double> mean, std::span<const float> x);

void encode_memory(dataio::ByteWriter& w, const GaussianMemory& memory);
GaussianMemory decode_memory(dataio::ByteReader& r);

}  // namespace fccd::memory
