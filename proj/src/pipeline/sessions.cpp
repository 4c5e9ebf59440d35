#include "fccd/pipeline/sessions.hpp"

#include <algorithm>
#include <string>

#include "fccd/clustering/estimate.hpp"
#include "fccd/errors.hpp"
#include "fccd/memory/replay.hpp"
#include "fccd/random.hpp"

namespace fccd::pipeline {

namespace {

constexpr std::uint64_t kHeadTag = 0x68656164;
constexpr std::uint64_t kReplayTag = 0x72706c79;
constexpr std::uint64_t kTrainTag = 0x7472616e;
constexpr std::uint64_t kClusterTag = 0x636c7573;
constexpr std::uint64_t kEstimateTag = 0x65737469;
constexpr std::uint64_t kCalibrateTag = 0x63616c69;

classifier::TrainConfig train_config(const PipelineConfig& cfg, const AblationFlags& flags, std::uint64_t seed,
                                     std::int32_t session) {
  classifier::TrainConfig tc = cfg.train;
  tc.seed = derive_seed(seed, {kTrainTag, static_cast<std::uint64_t>(session)});
  tc.loss = flags.ln ? classifier::LossKind::logit_norm : classifier::LossKind::cross_entropy;
  return tc;
}

// Retrains the head on replay drawn from every stored Gaussian.
classifier::LinearHead retrain_on_replay(classifier::LinearHead head, const memory::GaussianMemory& memory,
                                         const classifier::TrainConfig& tc, const PipelineConfig& cfg,
                                         std::uint64_t seed, std::int32_t session) {
  auto replay = memory::sample_replay(memory, cfg.replay_per_class,
                                      derive_seed(seed, {kReplayTag, static_cast<std::uint64_t>(session)}));
  l2_normalize_rows(replay.features);
  return classifier::train_head(std::move(head), replay.features, replay.labels, tc);
}

}  // namespace

PipelineConfig PipelineConfig::from_options(const dataio::ManifestOptions& o) {
  PipelineConfig c;
  c.overcluster_factor = o.overcluster_factor;
  c.estimate_upper_bound = o.estimate_upper_bound;
  c.dmin_rule = o.dmin_rule;
  c.replay_per_class = o.replay_per_class;
  c.bias = o.bias;
  c.train.tau = o.tau;
  c.train.lr0 = o.lr0;
  c.train.epochs = o.epochs;
  c.train.batch_size = o.batch_size;
  c.train.momentum = o.momentum;
  c.gaussian.shrinkage = o.shrinkage;
  c.gaussian.variance_floor = o.variance_floor;
  c.kmeans.max_iters = o.kmeans_max_iters;
  c.kmeans.tol = o.kmeans_tol;
  c.kmeans.restarts = o.kmeans_restarts;
  return c;
}

Matrix to_feature_space(const Matrix& raw) { return l2_normalized(raw); }

RunState run_session_zero(RunState state, const EmbeddingSet& base, const AblationFlags& flags,
                          const PipelineConfig& cfg) {
  if (!state.fresh()) throw PreconditionError("session 0: run state is not fresh");
  if (!base.has_labels()) throw PreconditionError("session 0: labels required");
  base.validate();
  const auto& labels = *base.labels;
  if (std::find(labels.begin(), labels.end(), kUnlabeled) != labels.end()) {
    throw PreconditionError("session 0: every row needs a label");
  }
  const auto classes = base.distinct_labels();
  if (classes.size() < 2) {
    throw PreconditionError("session 0: at least 2 classes required, got " + std::to_string(classes.size()));
  }

  const Matrix x = to_feature_space(base.data);
  std::vector<std::int32_t> index(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    index[i] = static_cast<std::int32_t>(std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());
  }

  state.memory.append(memory::fit_gaussians(x, index, 0, 0, cfg.gaussian));
  state.head = classifier::LinearHead::create(classes.size(), x.cols(), derive_seed(state.seed, {kHeadTag, 0}), cfg.bias);
  const auto tc = train_config(cfg, flags, state.seed, 0);
  if (flags.gr) {
    state.head = retrain_on_replay(std::move(state.head), state.memory, tc, cfg, state.seed, 0);
  } else {
    state.head = classifier::train_head(std::move(state.head), x, index, tc);
  }

  std::vector<std::optional<std::int32_t>> identity(classes.begin(), classes.end());
  state.mapping.append_session(0, identity);

  EmbeddingSet normalized{x, labels};
  state.calibration = clustering::calibrate_dmin(normalized, cfg.overcluster_factor,
                                                 derive_seed(state.seed, {kCalibrateTag}), cfg.kmeans, cfg.dmin_rule);

  state.old_classes.insert(classes.begin(), classes.end());
  state.seen_classes.insert(classes.begin(), classes.end());
  eval::SessionMetrics rec;
  rec.session = 0;
  rec.heads_added = static_cast<std::int32_t>(classes.size());
  rec.true_classes = static_cast<std::int32_t>(classes.size());
  rec.pseudo_label_acc = 100.0;
  state.history.push_back(rec);
  state.session_cursor = 1;
  return state;
}

NovelSessionResult run_novel_session(RunState state, const EmbeddingSet& novel, std::optional<int> k,
                                     const AblationFlags& flags, const PipelineConfig& cfg,
                                     std::optional<std::span<const std::int32_t>> hidden_truth) {
  if (state.session_cursor < 1) throw PreconditionError("novel session: run the labeled session first");
  if (novel.has_labels()) throw PreconditionError("novel session: discovery input must be label-free");
  novel.validate();
  if (novel.dim() != state.memory.dim()) throw PreconditionError("novel session: dimension mismatch");
  if (hidden_truth && hidden_truth->size() != novel.count()) {
    throw PreconditionError("novel session: hidden truth length mismatch");
  }
  const std::int32_t session = state.session_cursor;
  const auto s = static_cast<std::uint64_t>(session);
  const Matrix x = to_feature_space(novel.data);

  NovelSessionResult out;
  if (k) {
    if (*k < 1) throw PreconditionError("novel session: k must be positive");
    out.k = *k;
  } else {
    if (!state.calibration) throw PreconditionError("novel session: k not given and no calibration stored");
    const int bound = cfg.estimate_upper_bound.value_or(cfg.overcluster_factor * state.calibration->source_class_count);
    const int upper = std::min<int>(bound, static_cast<int>(x.rows()));
    out.k = clustering::estimate_classes(x, *state.calibration, upper, derive_seed(state.seed, {kEstimateTag, s}),
                                         cfg.kmeans)
                .k;
    out.k_estimated = true;
  }

  const auto fit = clustering::kmeans(x, out.k, derive_seed(state.seed, {kClusterTag, s}), cfg.kmeans);
  out.pseudo_labels = fit.labels;
  const auto offset = static_cast<std::int32_t>(state.memory.size());
  state.memory.append(memory::fit_gaussians(x, fit.labels, offset, session, cfg.gaussian));
  state.head.extend(static_cast<std::size_t>(out.k), derive_seed(state.seed, {kHeadTag, s}));

  const auto tc = train_config(cfg, flags, state.seed, session);
  if (flags.gr) {
    state.head = retrain_on_replay(std::move(state.head), state.memory, tc, cfg, state.seed, session);
  } else {
    std::vector<std::int32_t> targets(fit.labels);
    for (auto& t : targets) t += offset;
    state.head = classifier::train_head(std::move(state.head), x, targets, tc);
  }

  eval::SessionMetrics rec;
  rec.session = session;
  rec.heads_added = out.k;
  rec.k_estimated = out.k_estimated;
  if (hidden_truth) {
    auto mapped = eval::map_clusters(fit.labels, static_cast<std::size_t>(out.k), *hidden_truth, session, state.mapping);
    state.mapping = std::move(mapped.mapping);
    out.pseudo_label_acc = mapped.pseudo_label_acc;
    std::set<std::int32_t> truth_classes;
    for (auto t : *hidden_truth) {
      if (t != kUnlabeled) truth_classes.insert(t);
    }
    state.seen_classes.insert(truth_classes.begin(), truth_classes.end());
    rec.true_classes = static_cast<std::int32_t>(truth_classes.size());
  } else {
    std::vector<std::optional<std::int32_t>> none(static_cast<std::size_t>(out.k));
    state.mapping.append_session(session, none);
  }
  rec.pseudo_label_acc = out.pseudo_label_acc;
  state.history.push_back(rec);
  state.session_cursor = session + 1;
  out.state = std::move(state);
  return out;
}

}  // namespace fccd::pipeline
