#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fccd/clustering/estimate.hpp"
#include "fccd/dataio/container.hpp"
#include "fccd/dataio/manifest.hpp"
#include "fccd/errors.hpp"
#include "fccd/eval/probes.hpp"
#include "fccd/pipeline/benchmark.hpp"
#include "fccd/pipeline/synthetic.hpp"
#include "fccd/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace fccd;

namespace {

std::string pct(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << eval::round1(v);
  return os.str();
}

std::string pct(const std::optional<double>& v) { return v ? pct(*v) : "NA"; }

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool estimate_k = false;
  bool no_gr = false;
  bool no_ln = false;
  bool no_sa = false;
  std::optional<std::string> resume;
  std::optional<int> stop_after;
};

int cmd_run(const RunArgs& a) {
  auto manifest = dataio::load_manifest(a.config);
  if (a.seed) manifest.seed = *a.seed;
  if (a.estimate_k) manifest.options.estimate_k = true;
  pipeline::AblationFlags flags{!a.no_sa, !a.no_gr, !a.no_ln};
  pipeline::RunOptions opts;
  opts.out_dir = fs::path(a.out);
  if (a.resume) opts.resume_from = fs::path(*a.resume);
  opts.stop_after = a.stop_after;
  const auto result = pipeline::run_benchmark(manifest, flags, opts);
  std::cout << eval::report_to_table(result.report);
  if (result.complete) {
    std::cout << "Last " << pct(result.report.final_accuracy.last) << "  Old " << pct(result.report.final_accuracy.old_acc)
              << "  New " << pct(result.report.final_accuracy.new_acc) << "\n";
  } else {
    std::cout << "stopped after session " << result.state.session_cursor - 1 << "; resume from "
              << pipeline::state_path(a.out, result.state.session_cursor - 1).string() << "\n";
  }
  return 0;
}

struct EstimateArgs {
  std::string base;
  std::string novel;
  int factor = 3;
  std::optional<int> upper_bound;
  std::uint64_t seed = 0;
  std::string rule = "min-pairwise";
};

int cmd_estimate(const EstimateArgs& a) {
  auto base = dataio::read_embedding_container(a.base);
  auto novel = dataio::read_embedding_container(a.novel).without_labels();
  l2_normalize_rows(base.data);
  l2_normalize_rows(novel.data);
  clustering::KMeansOptions kopts;
  kopts.restarts = 4;
  const auto rule = a.rule == "last-merge" ? dataio::DminRule::last_merge : dataio::DminRule::min_pairwise;
  const auto calib = clustering::calibrate_dmin(base, a.factor, a.seed, kopts, rule);
  const int bound = std::min<int>(a.upper_bound.value_or(a.factor * calib.source_class_count),
                                  static_cast<int>(novel.count()));
  const auto est = clustering::estimate_classes(novel.data, calib, bound, a.seed, kopts);
  std::cout << "d_min " << std::setprecision(6) << calib.d_min << " (" << dataio::dmin_rule_name(rule) << ")\n"
            << "over-clusters " << est.initial_clusters << "\n"
            << "estimated k " << est.k << "\n";
  return 0;
}

struct ProbeArgs {
  std::string train;
  std::string test;
  bool kmeans = false;
  bool linear = false;
  bool raw = false;
  std::uint64_t seed = 0;
  int epochs = 100;
};

int cmd_probe(const ProbeArgs& a) {
  auto train = dataio::read_embedding_container(a.train);
  auto test = dataio::read_embedding_container(a.test);
  if (!a.raw) {
    l2_normalize_rows(train.data);
    l2_normalize_rows(test.data);
  }
  const bool both = !a.kmeans && !a.linear;
  if (a.kmeans || both) {
    clustering::KMeansOptions kopts;
    kopts.restarts = 4;
    std::cout << "kmeans acc (train) " << pct(eval::kmeans_acc_probe(train, a.seed, kopts)) << "\n";
    std::cout << "kmeans acc (test) " << pct(eval::kmeans_acc_probe(test, a.seed, kopts)) << "\n";
  }
  if (a.linear || both) {
    classifier::TrainConfig cfg;
    cfg.seed = a.seed;
    cfg.epochs = a.epochs;
    const auto r = eval::linear_probe(train, test, cfg);
    std::cout << "linear probe acc " << pct(r.accuracy) << "\n";
    if (!r.unseen_test_classes.empty()) {
      std::cout << "test classes absent from train:";
      for (auto c : r.unseen_test_classes) std::cout << ' ' << c;
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_synth(const pipeline::SyntheticSpec& spec, const std::string& out) {
  pipeline::write_synthetic_benchmark(spec, out);
  std::cout << "wrote " << spec.sessions << " sessions x " << spec.classes_per_session << " classes to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fccd: continual category discovery on frozen embeddings"};
  app.require_subcommand(1);
  bool show_isa = false;
  app.add_flag("--isa", show_isa, "Print the selected SIMD kernel set");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a benchmark manifest session by session");
  run_cmd->add_option("--config", run.config, "Manifest JSON")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--seed", run.seed, "Override the manifest seed");
  run_cmd->add_flag("--estimate-k", run.estimate_k, "Estimate the class count of unlabeled sessions");
  run_cmd->add_flag("--no-gr", run.no_gr, "Train on current pseudo-labels instead of replay");
  run_cmd->add_flag("--no-ln", run.no_ln, "Plain cross-entropy instead of the logit-normalized loss");
  run_cmd->add_flag("--no-sa", run.no_sa, "Mark the embeddings as not adapted (recorded in the report)");
  run_cmd->add_option("--resume", run.resume, "State sidecar to continue from");
  run_cmd->add_option("--stop-after", run.stop_after, "Last session index to process");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate-k", "Estimate the number of classes in an unlabeled set");
  est_cmd->add_option("--base", est.base, "Labeled base container")->required();
  est_cmd->add_option("--novel", est.novel, "Unlabeled container")->required();
  est_cmd->add_option("--factor", est.factor, "Over-clustering factor")->capture_default_str()->check(CLI::PositiveNumber);
  est_cmd->add_option("--upper-bound", est.upper_bound, "Over-cluster count for the novel set");
  est_cmd->add_option("--seed", est.seed)->capture_default_str();
  est_cmd->add_option("--rule", est.rule, "d_min rule")
      ->capture_default_str()
      ->check(CLI::IsMember({"min-pairwise", "last-merge"}));

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "Representation quality of a labeled train/test pair");
  probe_cmd->add_option("--train", probe.train)->required();
  probe_cmd->add_option("--test", probe.test)->required();
  auto* km = probe_cmd->add_flag("--kmeans", probe.kmeans, "k-means clustering accuracy");
  probe_cmd->add_flag("--linear", probe.linear, "Linear probe accuracy")->excludes(km);
  probe_cmd->add_flag("--raw", probe.raw, "Skip L2 normalization");
  probe_cmd->add_option("--seed", probe.seed)->capture_default_str();
  probe_cmd->add_option("--epochs", probe.epochs)->capture_default_str()->check(CLI::NonNegativeNumber);

  pipeline::SyntheticSpec synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic Gaussian benchmark");
  synth_cmd->add_option("--sessions", synth.sessions)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--classes", synth.classes_per_session, "Classes per session")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--dim", synth.dim)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--sep", synth.separation, "Distance between class means in units of sigma")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--points", synth.points_per_class)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--test-points", synth.test_points_per_class)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_out)->required();

  CLI11_PARSE(app, argc, argv);
  if (show_isa) std::cerr << "simd: " << simd::isa_name(simd::active().isa) << "\n";

  try {
    if (*run_cmd) return cmd_run(run);
    if (*est_cmd) return cmd_estimate(est);
    if (*probe_cmd) return cmd_probe(probe);
    if (*synth_cmd) return cmd_synth(synth, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "fccd: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
