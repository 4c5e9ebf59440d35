#pragma once

#include <cstdint>
#include <vector>

#include "fccd/matrix.hpp"
#include "fccd/memory/gaussian_memory.hpp"

// Training-free classifiers over the Gaussian memory. Queries must live in
// the space the memory was fitted in (the pipeline feeds L2-normalized rows).
namespace fccd::classifier {

// Nearest class mean by Euclidean distance; ties go to the lower class_id.
std::vector<std::int32_t> ncm_predict(const memory::GaussianMemory& memory, const Matrix& features);

// argmin_c (x - mu_c)^T S_c^-1 (x - mu_c); ties go to the lower class_id.
// Throws NumericError when a covariance cannot be factorized.
std::vector<std::int32_t> mahalanobis_predict(const memory::GaussianMemory& memory, const Matrix& features);

}  // namespace fccd::classifier
