#include "fccd/pipeline/benchmark.hpp"

#include <algorithm>
#include <sstream>

#include "fccd/dataio/binary_io.hpp"
#include "fccd/dataio/container.hpp"
#include "fccd/errors.hpp"

namespace fccd::pipeline {

void AccessLog::record(std::int32_t session, std::string phase, AccessKind kind, std::filesystem::path path) {
  records_.push_back({session, std::move(phase), kind, std::move(path)});
}

std::vector<AccessRecord> AccessLog::for_session(std::int32_t session) const {
  std::vector<AccessRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [&](const AccessRecord& r) { return r.session == session; });
  return out;
}

std::string_view access_kind_name(AccessKind kind) {
  switch (kind) {
    case AccessKind::read_container: return "read-container";
    case AccessKind::read_state: return "read-state";
    case AccessKind::write_state: return "write-state";
    case AccessKind::write_report: return "write-report";
  }
  return "unknown";
}

std::string AccessLog::to_text() const {
  std::ostringstream os;
  os << "session\tphase\tkind\tpath\n";
  for (const auto& r : records_) {
    os << r.session << '\t' << r.phase << '\t' << access_kind_name(r.kind) << '\t' << r.path.string() << '\n';
  }
  return os.str();
}

std::filesystem::path state_path(const std::filesystem::path& out_dir, std::int32_t session) {
  return out_dir / ("state_" + std::to_string(session) + ".fcrs");
}

namespace {

struct JointTest {
  Matrix features;
  std::vector<std::int32_t> labels;
};

eval::Accuracy score(const RunState& state, const JointTest& test, bool all_rows) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < test.labels.size(); ++i) {
    if (all_rows || state.seen_classes.contains(test.labels[i])) rows.push_back(i);
  }
  Matrix x(rows.size(), test.features.cols());
  std::vector<std::int32_t> truth(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(test.features.row(rows[i]).begin(), x.cols(), x.row(i).begin());
    truth[i] = test.labels[rows[i]];
  }
  const auto predicted = rows.empty() ? std::vector<std::int32_t>{} : classifier::predict(state.head, x);
  return eval::score_predictions(predicted, state.mapping, truth, state.old_classes);
}

}  // namespace

BenchmarkResult run_benchmark(const dataio::SessionManifest& manifest, const AblationFlags& flags,
                              const RunOptions& options) {
  dataio::validate_manifest(manifest);
  if (!manifest.test) throw ValidationError("manifest: a joint test container is required to run a benchmark");
  const auto cfg = PipelineConfig::from_options(manifest.options);
  const auto n_sessions = static_cast<std::int32_t>(manifest.sessions.size());

  BenchmarkResult result;
  RunState& state = result.state;
  state.seed = manifest.seed;
  if (options.resume_from) {
    result.log.record(-1, "state", AccessKind::read_state, *options.resume_from);
    state = load_run_state(*options.resume_from);
    if (state.seed != manifest.seed) throw ValidationError("resume: state seed differs from the manifest seed");
    if (state.session_cursor > n_sessions) throw ValidationError("resume: state is past the manifest's last session");
  }
  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

  std::int32_t last = n_sessions - 1;
  if (options.stop_after) last = std::min(last, *options.stop_after);

  std::optional<JointTest> test;
  for (std::int32_t t = state.session_cursor; t <= last; ++t) {
    try {
      const auto& entry = manifest.sessions[static_cast<std::size_t>(t)];
      result.log.record(t, "discovery", AccessKind::read_container, entry.path);
      EmbeddingSet set = dataio::read_embedding_container(entry.path);
      if (t == 0) {
        state = run_session_zero(std::move(state), set, flags, cfg);
      } else {
        std::optional<std::vector<std::int32_t>> truth = std::move(set.labels);
        set.labels.reset();
        std::optional<int> k;
        if (!manifest.options.estimate_k) k = entry.class_count;
        std::optional<std::span<const std::int32_t>> hidden;
        if (truth) hidden = std::span<const std::int32_t>(*truth);
        state = run_novel_session(std::move(state), set, k, flags, cfg, hidden).state;
      }

      if (!test) {
        result.log.record(t, "eval", AccessKind::read_container, *manifest.test);
        auto joint = dataio::read_embedding_container(*manifest.test);
        if (!joint.has_labels()) throw ValidationError("joint test container has no labels");
        test = JointTest{to_feature_space(joint.data), std::move(*joint.labels)};
      }
      state.history.back().accuracy = score(state, *test, t == n_sessions - 1);

      if (options.out_dir) {
        const auto path = state_path(*options.out_dir, t);
        save_run_state(state, path);
        result.log.record(t, "state", AccessKind::write_state, path);
      }
    } catch (const Error& e) {
      throw Error("session " + std::to_string(t) + ": " + e.what());
    }
  }

  result.complete = state.session_cursor == n_sessions;
  result.report.sessions = state.history;
  if (!state.history.empty() && state.history.back().accuracy) result.report.final_accuracy = *state.history.back().accuracy;
  result.report.sa = flags.sa;
  result.report.gr = flags.gr;
  result.report.ln = flags.ln;

  if (options.out_dir) {
    const auto json_path = *options.out_dir / "metrics.json";
    const auto table_path = *options.out_dir / "metrics.tsv";
    dataio::write_text_file(json_path, eval::report_to_json(result.report));
    result.log.record(state.session_cursor - 1, "report", AccessKind::write_report, json_path);
    dataio::write_text_file(table_path, eval::report_to_table(result.report));
    result.log.record(state.session_cursor - 1, "report", AccessKind::write_report, table_path);
    const auto log_path = *options.out_dir / "access_log.tsv";
    result.log.record(state.session_cursor - 1, "report", AccessKind::write_report, log_path);
    dataio::write_text_file(log_path, result.log.to_text());
  }
  return result;
}

}  // namespace fccd::pipeline
