#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fccd/dataio/embedding_set.hpp"
#include "fccd/dataio/manifest.hpp"

namespace fccd::pipeline {

// Isotropic Gaussian classes with unit within-class deviation. Class means
// sit on scaled coordinate axes, so every pair of means is exactly
// `separation` apart; past `dim` classes the axes run out and means fall
// back to random directions with the same radius (pairwise distance only
// approximately `separation`).
struct SyntheticSpec {
  int sessions = 4;
  int classes_per_session = 5;
  int dim = 64;
  double separation = 10.0;
  int points_per_class = 200;
  int test_points_per_class = 200;
  std::uint64_t seed = 0;
};

struct SyntheticBenchmark {
  std::vector<EmbeddingSet> train;  // one per session, labels = global class IDs
  std::vector<EmbeddingSet> test;   // one per session
  EmbeddingSet joint_test;          // all sessions' test rows, shuffled
};

// Throws PreconditionError unless every count is positive and separation >= 0.
SyntheticBenchmark make_synthetic_benchmark(const SyntheticSpec& spec);

// Writes session_<t>_train.fccd, session_<t>_test.fccd, test.fccd and
// manifest.json into out_dir. The manifest uses relative paths.
dataio::SessionManifest write_synthetic_benchmark(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace fccd::pipeline
