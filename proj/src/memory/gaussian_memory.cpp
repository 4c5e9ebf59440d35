#include "fccd/memory/gaussian_memory.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fccd/errors.hpp"

namespace fccd::memory {

void GaussianMemory::append(std::vector<ClusterGaussian> fresh) {
  for (auto& g : fresh) {
    if (g.class_id != static_cast<std::int32_t>(entries_.size())) {
      throw PreconditionError("memory: expected class_id " + std::to_string(entries_.size()) + ", got " +
                              std::to_string(g.class_id));
    }
    if (!entries_.empty() && g.dim() != dim()) throw PreconditionError("memory: dimension mismatch");
    if (g.count == 0) throw PreconditionError("memory: entry with zero samples");
    entries_.push_back(std::move(g));
  }
}

std::vector<ClusterGaussian> fit_gaussians(const Matrix& data, std::span<const std::int32_t> assignment,
                                           std::int32_t id_offset, std::int32_t session,
                                           const GaussianOptions& options) {
  if (assignment.size() != data.rows()) throw PreconditionError("fit_gaussians: assignment size mismatch");
  std::int32_t k = 0;
  for (std::int32_t a : assignment) {
    if (a < 0) throw PreconditionError("fit_gaussians: negative cluster index");
    k = std::max(k, a + 1);
  }
  const std::size_t dim = data.cols();
  std::vector<ClusterGaussian> out(static_cast<std::size_t>(k));
  for (std::int32_t c = 0; c < k; ++c) {
    out[c].class_id = id_offset + c;
    out[c].session = session;
    out[c].mean.assign(dim, 0.0);
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto& g = out[static_cast<std::size_t>(assignment[i])];
    ++g.count;
    const auto x = data.row(i);
    for (std::size_t d = 0; d < dim; ++d) g.mean[d] += x[d];
  }
  for (auto& g : out) {
    if (g.count == 0) throw PreconditionError("fit_gaussians: empty cluster " + std::to_string(g.class_id - id_offset));
    for (double& m : g.mean) m /= static_cast<double>(g.count);
    g.mode = g.count < dim ? CovarianceMode::diagonal : CovarianceMode::full;
    g.covariance.assign(g.mode == CovarianceMode::full ? dim * dim : dim, 0.0);
  }

  std::vector<double> centered(dim);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto& g = out[static_cast<std::size_t>(assignment[i])];
    const auto x = data.row(i);
    for (std::size_t d = 0; d < dim; ++d) centered[d] = x[d] - g.mean[d];
    if (g.mode == CovarianceMode::diagonal) {
      for (std::size_t d = 0; d < dim; ++d) g.covariance[d] += centered[d] * centered[d];
    } else {
      for (std::size_t a = 0; a < dim; ++a) {
        double* row = g.covariance.data() + a * dim;
        for (std::size_t b = a; b < dim; ++b) row[b] += centered[a] * centered[b];
      }
    }
  }

  const double lambda = options.shrinkage;
  for (auto& g : out) {
    const double denom = g.count > 1 ? static_cast<double>(g.count - 1) : 1.0;
    if (g.mode == CovarianceMode::diagonal) {
      for (double& v : g.covariance) v = v / denom + options.variance_floor;
      continue;
    }
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a; b < dim; ++b) {
        double v = g.covariance[a * dim + b] / denom;
        if (a == b) {
          v += options.variance_floor;
        } else {
          v *= 1.0 - lambda;
        }
        g.covariance[a * dim + b] = v;
        g.covariance[b * dim + a] = v;
      }
    }
  }
  return out;
}

std::vector<double> cholesky_lower(const ClusterGaussian& g) {
  const std::size_t dim = g.dim();
  std::vector<double> lower(dim * dim, 0.0);
  if (g.mode == CovarianceMode::diagonal) {
    for (std::size_t d = 0; d < dim; ++d) {
      if (!(g.covariance[d] > 0.0)) {
        throw NumericError("class " + std::to_string(g.class_id) + ": non-positive variance");
      }
      lower[d * dim + d] = std::sqrt(g.covariance[d]);
    }
    return lower;
  }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> cov(g.covariance.data(), static_cast<Eigen::Index>(dim),
                                     static_cast<Eigen::Index>(dim));
  Eigen::LLT<RowMat> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericError("class " + std::to_string(g.class_id) + ": covariance is not positive definite");
  }
  Eigen::Map<RowMat>(lower.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) =
      llt.matrixL().toDenseMatrix();
  return lower;
}

double mahalanobis_squared(std::span<const double> lower, std::span<const double> mean, std::span<const float> x) {
  const std::size_t dim = mean.size();
  // Forward substitution L y = x - mu; the distance is |y|^2.
  std::vector<double> y(dim);
  double total = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double v = static_cast<double>(x[i]) - mean[i];
    const double* row = lower.data() + i * dim;
    for (std::size_t j = 0; j < i; ++j) v -= row[j] * y[j];
    y[i] = v / row[i];
    total += y[i] * y[i];
  }
  return total;
}

void encode_memory(dataio::ByteWriter& w, const GaussianMemory& memory) {
  w.put_u64(memory.size());
  w.put_u32(static_cast<std::uint32_t>(memory.dim()));
  for (const auto& g : memory.entries()) {
    w.put_i32(g.class_id);
    w.put_i32(g.session);
    w.put_u64(g.count);
    w.put_u16(static_cast<std::uint16_t>(g.mode));
    for (double m : g.mean) w.put_f64(m);
    for (double c : g.covariance) w.put_f64(c);
  }
}

GaussianMemory decode_memory(dataio::ByteReader& r) {
  const std::uint64_t n = r.get_u64();
  const std::uint32_t dim = r.get_u32();
  if (n > 0 && dim == 0) throw FormatError("memory: zero dimension", r.offset() - 4);
  std::vector<ClusterGaussian> entries;
  for (std::uint64_t i = 0; i < n; ++i) {
    ClusterGaussian g;
    g.class_id = r.get_i32();
    g.session = r.get_i32();
    g.count = r.get_u64();
    const std::size_t mode_at = r.offset();
    const std::uint16_t mode = r.get_u16();
    if (mode > 1) throw FormatError("memory: unknown covariance mode", mode_at);
    g.mode = static_cast<CovarianceMode>(mode);
    g.mean.resize(dim);
    for (double& m : g.mean) m = r.get_f64();
    g.covariance.resize(g.mode == CovarianceMode::full ? static_cast<std::size_t>(dim) * dim : dim);
    for (double& c : g.covariance) c = r.get_f64();
    entries.push_back(std::move(g));
  }
  GaussianMemory memory;
  try {
    memory.append(std::move(entries));
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("memory: ") + e.what(), r.offset());
  }
  return memory;
}

}  // namespace fccd::memory
