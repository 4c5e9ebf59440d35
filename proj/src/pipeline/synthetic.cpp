#include "fccd/pipeline/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fccd/dataio/binary_io.hpp"
#include "fccd/dataio/container.hpp"
#include "fccd/errors.hpp"
#include "fccd/random.hpp"

namespace fccd::pipeline {
namespace {

std::vector<std::vector<double>> class_means(const SyntheticSpec& spec) {
  const int total = spec.sessions * spec.classes_per_session;
  const double radius = spec.separation / std::sqrt(2.0);
  std::vector<std::vector<double>> means(total, std::vector<double>(spec.dim, 0.0));
  if (total <= spec.dim) {
    for (int c = 0; c < total; ++c) means[c][c] = radius;
    return means;
  }
  Rng rng(derive_seed(spec.seed, {0x6d65616e}));
  std::normal_distribution<double> normal;
  for (auto& m : means) {
    double norm = 0.0;
    for (double& v : m) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : m) v *= radius / norm;
  }
  return means;
}

EmbeddingSet draw(const SyntheticSpec& spec, const std::vector<std::vector<double>>& means, int session,
                  int per_class, std::uint64_t split) {
  EmbeddingSet set;
  set.data = Matrix(static_cast<std::size_t>(per_class) * spec.classes_per_session, spec.dim);
  set.labels.emplace();
  std::size_t row = 0;
  for (int local = 0; local < spec.classes_per_session; ++local) {
    const int cls = session * spec.classes_per_session + local;
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(cls), split}));
    std::normal_distribution<double> normal;
    for (int p = 0; p < per_class; ++p, ++row) {
      auto r = set.data.row(row);
      for (int d = 0; d < spec.dim; ++d) r[d] = static_cast<float>(means[cls][d] + normal(rng));
      set.labels->push_back(cls);
    }
  }
  std::vector<std::size_t> order(set.count());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(spec.seed, {0x5f, static_cast<std::uint64_t>(session), split}));
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  return set.select_rows(order);
}

}  // namespace

SyntheticBenchmark make_synthetic_benchmark(const SyntheticSpec& spec) {
  if (spec.sessions <= 0 || spec.classes_per_session <= 0 || spec.dim <= 0 || spec.points_per_class <= 0 ||
      spec.test_points_per_class <= 0 || !(spec.separation >= 0.0)) {
    throw PreconditionError("synthetic benchmark: counts must be positive and separation non-negative");
  }
  const auto means = class_means(spec);
  SyntheticBenchmark out;
  EmbeddingSet joint;
  joint.data = Matrix(0, spec.dim);
  joint.labels.emplace();
  for (int s = 0; s < spec.sessions; ++s) {
    out.train.push_back(draw(spec, means, s, spec.points_per_class, 1));
    out.test.push_back(draw(spec, means, s, spec.test_points_per_class, 2));
    const auto& t = out.test.back();
    for (std::size_t i = 0; i < t.count(); ++i) {
      joint.data.append_row(t.data.row(i));
      joint.labels->push_back((*t.labels)[i]);
    }
  }
  std::vector<std::size_t> order(joint.count());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(spec.seed, {0x6a6f696e74}));
  std::shuffle(order.begin(), order.end(), rng);
  out.joint_test = joint.select_rows(order);
  return out;
}

dataio::SessionManifest write_synthetic_benchmark(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  const auto bench = make_synthetic_benchmark(spec);
  std::filesystem::create_directories(out_dir);
  dataio::SessionManifest manifest;
  manifest.seed = spec.seed;
  for (int s = 0; s < spec.sessions; ++s) {
    const std::string train = "session_" + std::to_string(s) + "_train.fccd";
    const std::string test = "session_" + std::to_string(s) + "_test.fccd";
    dataio::write_embedding_container(bench.train[s], out_dir / train);
    dataio::write_embedding_container(bench.test[s], out_dir / test);
    manifest.sessions.push_back({train, s == 0, spec.classes_per_session});
  }
  dataio::write_embedding_container(bench.joint_test, out_dir / "test.fccd");
  manifest.test = "test.fccd";
  dataio::write_text_file(out_dir / "manifest.json", dataio::dump_manifest(manifest));

  // Hand back absolute paths, as load_manifest would.
  for (auto& s : manifest.sessions) s.path = out_dir / s.path;
  manifest.test = out_dir / *manifest.test;
  return manifest;
}

}  // namespace fccd::pipeline
