#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fccd/dataio/binary_io.hpp"
#include "fccd/dataio/container.hpp"
#include "fccd/errors.hpp"
#include "fccd/eval/probes.hpp"
#include "fccd/memory/replay.hpp"
#include "fccd/pipeline/benchmark.hpp"
#include "fccd/pipeline/synthetic.hpp"
#include "test_util.hpp"

using namespace fccd;
using namespace fccd::pipeline;

namespace {

PipelineConfig quick_config() {
  dataio::ManifestOptions o;
  o.epochs = 30;
  o.replay_per_class = 128;
  return PipelineConfig::from_options(o);
}

SyntheticSpec small_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.sessions = 3;
  s.classes_per_session = 4;
  s.dim = 16;
  s.points_per_class = 80;
  s.test_points_per_class = 40;
  s.seed = seed;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("session zero: fits one Gaussian per class and a head that separates replay") {
  const auto bench = make_synthetic_benchmark(small_spec(1));
  RunState st;
  st.seed = 5;
  st = run_session_zero(std::move(st), bench.train[0], {}, quick_config());
  CHECK(st.memory.size() == 4);
  CHECK(st.head.num_classes() == 4);
  CHECK(st.mapping.head_count() == 4);
  CHECK(st.calibration.has_value());
  CHECK(st.session_cursor == 1);

  auto replay = memory::sample_replay(st.memory, 200, 99);
  l2_normalize_rows(replay.features);
  const auto p = classifier::predict(st.head, replay.features);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < p.size(); ++i) ok += p[i] == replay.labels[i];
  CHECK(100.0 * static_cast<double>(ok) / static_cast<double>(p.size()) >= 99.0);

  RunState again;
  again.seed = 5;
  again = run_session_zero(std::move(again), bench.train[0], {}, quick_config());
  CHECK(encode_run_state(again) == encode_run_state(st));

  CHECK_THROWS_AS(run_session_zero(st, bench.train[0], {}, quick_config()), PreconditionError);
}

TEST_CASE("session zero rejects a single class") {
  auto one = testutil::blobs(1, 20, 4, 1.0, 2);
  CHECK_THROWS_AS(run_session_zero({}, one, {}, quick_config()), PreconditionError);
}

TEST_CASE("novel session: true k on separated clusters, append-only memory, label firewall") {
  const auto bench = make_synthetic_benchmark(small_spec(2));
  const auto cfg = quick_config();
  RunState st = run_session_zero({}, bench.train[0], {}, cfg);
  const auto before = st.memory.entries();

  CHECK_THROWS_AS(run_novel_session(st, bench.train[1], 4, {}, cfg), PreconditionError);

  const auto view = bench.train[1].without_labels();
  const auto r = run_novel_session(st, view, 4, {}, cfg, std::span<const std::int32_t>(*bench.train[1].labels));
  CHECK(r.pseudo_label_acc == 100.0);
  CHECK(r.state.memory.size() == 8);
  CHECK(r.state.head.num_classes() == 8);
  CHECK(r.state.mapping.head_count() == 8);
  CHECK(r.state.session_cursor == 2);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(r.state.memory[i] == before[i]);
  CHECK(r.state.memory[5].session == 1);

  const auto unmapped = run_novel_session(st, view, 4, {}, cfg);
  CHECK_FALSE(unmapped.pseudo_label_acc.has_value());
  CHECK_FALSE(unmapped.state.mapping.truth_of(4).has_value());

  RunState bare = st;
  bare.calibration.reset();
  CHECK_THROWS_AS(run_novel_session(bare, view, std::nullopt, {}, cfg), PreconditionError);
}

TEST_CASE("synthetic generator: byte-identical files, geometry extremes") {
  testutil::TempDir a("synth_a"), b("synth_b");
  const auto spec = small_spec(4);
  write_synthetic_benchmark(spec, a.path());
  write_synthetic_benchmark(spec, b.path());
  for (const char* f : {"session_0_train.fccd", "session_2_test.fccd", "test.fccd", "manifest.json"}) {
    CHECK(slurp(a.path() / f) == slurp(b.path() / f));
  }
  const auto m = dataio::load_manifest(a.path() / "manifest.json");
  CHECK(m.session_count() == 3);
  CHECK(m.sessions[1].class_count == 4);

  SyntheticSpec far;
  far.sessions = 1;
  far.classes_per_session = 2;
  far.separation = 20.0;
  far.seed = 3;
  CHECK(eval::kmeans_acc_probe(make_synthetic_benchmark(far).train[0], 1) == 100.0);

  double total = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    SyntheticSpec flat = far;
    flat.separation = 0.0;
    flat.seed = s;
    total += eval::kmeans_acc_probe(make_synthetic_benchmark(flat).train[0], s);
  }
  CHECK(total / 10.0 < 60.0);

  SyntheticSpec bad = far;
  bad.dim = 0;
  CHECK_THROWS_AS(make_synthetic_benchmark(bad), PreconditionError);
}

TEST_CASE("benchmark: deterministic reports, monotone head growth, audit log") {
  testutil::TempDir dir("bench");
  const auto manifest = write_synthetic_benchmark(small_spec(6), dir.path() / "data");
  auto m = manifest;
  m.options.epochs = 30;
  const auto r1 = run_benchmark(m, {}, {dir.path() / "r1", std::nullopt, std::nullopt});
  const auto r2 = run_benchmark(m, {}, {dir.path() / "r2", std::nullopt, std::nullopt});
  CHECK(r1.complete);
  CHECK(slurp(dir.path() / "r1" / "metrics.json") == slurp(dir.path() / "r2" / "metrics.json"));
  CHECK(slurp(dir.path() / "r1" / "metrics.tsv") == slurp(dir.path() / "r2" / "metrics.tsv"));
  CHECK(r1.report.sessions.size() == 3);
  int heads = 0;
  for (const auto& s : r1.report.sessions) {
    heads += s.heads_added;
    CHECK(s.accuracy.has_value());
  }
  CHECK(heads == static_cast<int>(r1.state.head.num_classes()));
  CHECK(r1.report.last_acc() >= 95.0);

  for (std::int32_t t = 1; t < 3; ++t) {
    for (const auto& rec : r1.log.for_session(t)) {
      if (rec.kind != AccessKind::read_container) continue;
      const bool own = rec.path == m.sessions[static_cast<std::size_t>(t)].path;
      const bool joint = rec.path == *m.test;
      CHECK((own || joint));
      for (std::int32_t prior = 0; prior < t; ++prior) CHECK(rec.path != m.sessions[static_cast<std::size_t>(prior)].path);
    }
  }
  CHECK(std::filesystem::exists(dir.path() / "r1" / "access_log.tsv"));
  CHECK(std::filesystem::exists(state_path(dir.path() / "r1", 2)));
}

TEST_CASE("benchmark: stop, reload state, resume gives identical metrics") {
  testutil::TempDir dir("resume");
  auto m = write_synthetic_benchmark(small_spec(7), dir.path() / "data");
  m.options.epochs = 30;
  run_benchmark(m, {}, {dir.path() / "full", std::nullopt, std::nullopt});
  const auto partial = run_benchmark(m, {}, {dir.path() / "part", std::nullopt, 1});
  CHECK_FALSE(partial.complete);
  CHECK(partial.state.session_cursor == 2);

  const auto saved = load_run_state(state_path(dir.path() / "part", 1));
  CHECK(saved == partial.state);
  const auto resumed = run_benchmark(m, {}, {dir.path() / "part", state_path(dir.path() / "part", 1), std::nullopt});
  CHECK(resumed.complete);
  CHECK(slurp(dir.path() / "full" / "metrics.json") == slurp(dir.path() / "part" / "metrics.json"));
  CHECK(encode_run_state(resumed.state) == dataio::read_file(state_path(dir.path() / "full", 2)));
  for (const auto& rec : resumed.log.records()) {
    if (rec.kind == AccessKind::read_container && rec.phase == "discovery") CHECK(rec.path == m.sessions[2].path);
  }
}

TEST_CASE("benchmark: validation and failure reporting") {
  dataio::SessionManifest empty;
  CHECK_THROWS_AS(run_benchmark(empty, {}), ValidationError);

  testutil::TempDir dir("fail");
  auto m = write_synthetic_benchmark(small_spec(8), dir.path());
  auto no_test = m;
  no_test.test.reset();
  CHECK_THROWS_AS(run_benchmark(no_test, {}), ValidationError);

  m.sessions[2].path = dir.path() / "missing.fccd";
  m.options.epochs = 5;
  try {
    run_benchmark(m, {});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("session 2:", 0) == 0);
  }
}

TEST_CASE("run state sidecar rejects corruption") {
  const auto bench = make_synthetic_benchmark(small_spec(9));
  const auto st = run_session_zero({}, bench.train[0], {}, quick_config());
  auto bytes = encode_run_state(st);
  CHECK(decode_run_state(bytes) == st);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_run_state(bad), FormatError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_run_state(bad), FormatError);
}
