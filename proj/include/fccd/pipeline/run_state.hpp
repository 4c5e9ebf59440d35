#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <vector>

#include "fccd/classifier/linear_head.hpp"
#include "fccd/clustering/estimate.hpp"
#include "fccd/eval/mapping.hpp"
#include "fccd/eval/metrics.hpp"
#include "fccd/memory/gaussian_memory.hpp"

namespace fccd::pipeline {

// Everything carried from one session to the next. Raw embeddings of
// finished sessions are never part of it.
struct RunState {
  memory::GaussianMemory memory;
  classifier::LinearHead head;
  eval::ClusterMapping mapping;
  std::optional<clustering::MergeCalibration> calibration;
  std::int32_t session_cursor = 0;  // index of the next session to process
  std::uint64_t seed = 0;

  // Evaluation bookkeeping, filled from hidden labels only.
  std::set<std::int32_t> old_classes;   // ground-truth IDs of the labeled session
  std::set<std::int32_t> seen_classes;  // ground-truth IDs of every processed session
  std::vector<eval::SessionMetrics> history;

  bool fresh() const noexcept { return session_cursor == 0 && memory.empty(); }

  friend bool operator==(const RunState&, const RunState&) = default;
};

std::vector<std::uint8_t> encode_run_state(const RunState& state);
RunState decode_run_state(std::span<const std::uint8_t> bytes);
void save_run_state(const RunState& state, const std::filesystem::path& path);
RunState load_run_state(const std::filesystem::path& path);

}  // namespace fccd::pipeline
