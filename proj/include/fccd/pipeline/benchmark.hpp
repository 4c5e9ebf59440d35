#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fccd/dataio/manifest.hpp"
#include "fccd/eval/metrics.hpp"
#include "fccd/pipeline/run_state.hpp"
#include "fccd/pipeline/sessions.hpp"

namespace fccd::pipeline {

enum class AccessKind { read_container, read_state, write_state, write_report };

struct AccessRecord {
  std::int32_t session = 0;  // session being processed when the access happened
  std::string phase;         // "discovery", "eval", "state" or "report"
  AccessKind kind = AccessKind::read_container;
  std::filesystem::path path;
  friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

class AccessLog {
 public:
  void record(std::int32_t session, std::string phase, AccessKind kind, std::filesystem::path path);
  const std::vector<AccessRecord>& records() const noexcept { return records_; }
  std::vector<AccessRecord> for_session(std::int32_t session) const;
  std::string to_text() const;

 private:
  std::vector<AccessRecord> records_;
};

std::string_view access_kind_name(AccessKind kind);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;      // sidecars, reports and the access log go here
  std::optional<std::filesystem::path> resume_from;  // state sidecar to continue from
  std::optional<int> stop_after;                     // last session index to process
};

struct BenchmarkResult {
  eval::MetricsReport report;
  RunState state;
  AccessLog log;
  bool complete = false;  // every session processed
};

// Runs the manifest's sessions in order. After each session the head is
// scored on the joint test rows of classes seen so far; after the last one
// on the whole joint test set. Failures are rethrown as Error with the
// session index prepended.
BenchmarkResult run_benchmark(const dataio::SessionManifest& manifest, const AblationFlags& flags,
                              const RunOptions& options = {});

std::filesystem::path state_path(const std::filesystem::path& out_dir, std::int32_t session);

}  // namespace fccd::pipeline
