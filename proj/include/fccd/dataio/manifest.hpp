#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fccd::dataio {

struct SessionEntry {
  std::filesystem::path path;  // training container for this session
  bool labeled = false;
  std::optional<int> class_count;

  friend bool operator==(const SessionEntry&, const SessionEntry&) = default;
};

// Which distance the base-session calibration reports as the merge threshold.
enum class DminRule {
  min_pairwise,  // smallest centroid distance among the surviving clusters
  last_merge,    // distance of the final merge performed
};

struct ManifestOptions {
  bool estimate_k = false;
  int overcluster_factor = 3;
  // Over-cluster count used on novel sessions when estimating k; defaults to
  // overcluster_factor * (base class count).
  std::optional<int> estimate_upper_bound;
  DminRule dmin_rule = DminRule::min_pairwise;
  int replay_per_class = 256;
  double tau = 0.1;
  int epochs = 100;
  int batch_size = 128;
  double lr0 = 0.1;
  double momentum = 0.9;
  bool bias = true;
  double shrinkage = 0.1;
  double variance_floor = 1e-4;
  int kmeans_max_iters = 300;
  double kmeans_tol = 1e-4;
  int kmeans_restarts = 4;

  friend bool operator==(const ManifestOptions&, const ManifestOptions&) = default;
};

// A benchmark: ordered sessions (the first labeled, the rest not), the joint
// test container, a seed and run options. Relative paths are resolved against
// the manifest's directory at load time.
struct SessionManifest {
  std::vector<SessionEntry> sessions;
  std::optional<std::filesystem::path> test;
  std::uint64_t seed = 0;
  ManifestOptions options;

  std::size_t session_count() const noexcept { return sessions.size(); }
  friend bool operator==(const SessionManifest&, const SessionManifest&) = default;
};

// Throws ValidationError on malformed text or a violated manifest invariant.
SessionManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);
SessionManifest load_manifest(const std::filesystem::path& path);

// Serializes with paths written as given (callers pass relative paths when
// the manifest should be relocatable).
std::string dump_manifest(const SessionManifest& manifest);

void validate_manifest(const SessionManifest& manifest);

std::string_view dmin_rule_name(DminRule rule);

}  // namespace fccd::dataio
