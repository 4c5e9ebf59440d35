#include "fccd/eval/probes.hpp"

#include <algorithm>

#include "fccd/errors.hpp"
#include "fccd/eval/mapping.hpp"
#include "fccd/random.hpp"

namespace fccd::eval {

double kmeans_acc_probe(const EmbeddingSet& set, std::uint64_t seed, const clustering::KMeansOptions& opts) {
  if (!set.has_labels()) throw PreconditionError("kmeans probe: labels required");
  const auto classes = set.distinct_labels();
  if (classes.empty()) throw PreconditionError("kmeans probe: no labeled rows");
  const auto fit = clustering::kmeans(set.data, static_cast<int>(classes.size()), seed, opts);
  return match_clusters(fit.labels, fit.k(), *set.labels).accuracy();
}

ProbeResult linear_probe(const EmbeddingSet& train, const EmbeddingSet& test, const classifier::TrainConfig& cfg) {
  if (!train.has_labels() || !test.has_labels()) throw PreconditionError("linear probe: labels required");
  if (train.dim() != test.dim()) throw PreconditionError("linear probe: dimension mismatch");
  const auto classes = train.distinct_labels();
  if (classes.empty()) throw PreconditionError("linear probe: no labeled training rows");

  auto index_of = [&](std::int32_t c) -> std::int32_t {
    const auto it = std::lower_bound(classes.begin(), classes.end(), c);
    return it != classes.end() && *it == c ? static_cast<std::int32_t>(it - classes.begin()) : -1;
  };

  std::vector<std::size_t> rows;
  std::vector<std::int32_t> targets;
  for (std::size_t i = 0; i < train.count(); ++i) {
    if ((*train.labels)[i] == kUnlabeled) continue;
    rows.push_back(i);
    targets.push_back(index_of((*train.labels)[i]));
  }
  const Matrix features = train.select_rows(rows).data;

  classifier::TrainConfig tc = cfg;
  tc.loss = classifier::LossKind::cross_entropy;
  auto head = classifier::LinearHead::create(classes.size(), train.dim(), derive_seed(cfg.seed, {0x70726f6265}));
  head = classifier::train_head(std::move(head), features, targets, tc);

  const auto predicted = classifier::predict(head, test.data);
  ProbeResult out;
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < test.count(); ++i) {
    const std::int32_t t = (*test.labels)[i];
    if (t == kUnlabeled) continue;
    ++total;
    const std::int32_t idx = index_of(t);
    if (idx < 0) {
      if (std::find(out.unseen_test_classes.begin(), out.unseen_test_classes.end(), t) == out.unseen_test_classes.end())
        out.unseen_test_classes.push_back(t);
      continue;
    }
    correct += predicted[i] == idx ? 1 : 0;
  }
  std::sort(out.unseen_test_classes.begin(), out.unseen_test_classes.end());
  out.accuracy = total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  return out;
}

}  // namespace fccd::eval
