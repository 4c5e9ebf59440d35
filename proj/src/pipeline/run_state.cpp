#include "fccd/pipeline/run_state.hpp"

#include <string>

#include "fccd/errors.hpp"

namespace fccd::pipeline {

namespace {

constexpr std::string_view kMagic = "FCRS";
constexpr std::uint16_t kVersion = 1;

void put_opt_f64(dataio::ByteWriter& w, const std::optional<double>& v) {
  w.put_u16(v ? 1 : 0);
  w.put_f64(v.value_or(0.0));
}

std::optional<double> get_opt_f64(dataio::ByteReader& r) {
  const std::size_t at = r.offset();
  const auto flag = r.get_u16();
  const double v = r.get_f64();
  if (flag > 1) throw FormatError("state: bad optional flag", at);
  return flag ? std::optional<double>(v) : std::nullopt;
}

void put_bool(dataio::ByteWriter& w, bool b) { w.put_u16(b ? 1 : 0); }

bool get_bool(dataio::ByteReader& r) {
  const std::size_t at = r.offset();
  const auto v = r.get_u16();
  if (v > 1) throw FormatError("state: bad boolean", at);
  return v == 1;
}

void put_set(dataio::ByteWriter& w, const std::set<std::int32_t>& s) {
  w.put_u64(s.size());
  for (auto v : s) w.put_i32(v);
}

std::set<std::int32_t> get_set(dataio::ByteReader& r) {
  const std::size_t at = r.offset();
  const auto n = r.get_u64();
  if (n > r.remaining() / 4) throw FormatError("state: set size exceeds input", at);
  std::set<std::int32_t> s;
  for (std::uint64_t i = 0; i < n; ++i) s.insert(r.get_i32());
  return s;
}

void put_accuracy(dataio::ByteWriter& w, const eval::Accuracy& a) {
  w.put_f64(a.last);
  put_opt_f64(w, a.old_acc);
  put_opt_f64(w, a.new_acc);
  w.put_u64(a.n_old);
  w.put_u64(a.n_new);
  w.put_u64(a.correct_old);
  w.put_u64(a.correct_new);
}

eval::Accuracy get_accuracy(dataio::ByteReader& r) {
  eval::Accuracy a;
  a.last = r.get_f64();
  a.old_acc = get_opt_f64(r);
  a.new_acc = get_opt_f64(r);
  a.n_old = r.get_u64();
  a.n_new = r.get_u64();
  a.correct_old = r.get_u64();
  a.correct_new = r.get_u64();
  return a;
}

}  // namespace

std::vector<std::uint8_t> encode_run_state(const RunState& state) {
  dataio::ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u16(kVersion);
  w.put_i32(state.session_cursor);
  w.put_u64(state.seed);

  memory::encode_memory(w, state.memory);
  classifier::encode_head(w, state.head);
  eval::encode_mapping(w, state.mapping);

  put_bool(w, state.calibration.has_value());
  if (state.calibration) {
    const auto& c = *state.calibration;
    w.put_f64(c.d_min);
    w.put_i32(c.overcluster_factor);
    w.put_i32(c.source_class_count);
    w.put_u16(static_cast<std::uint16_t>(c.rule));
    w.put_f64(c.min_pairwise_distance);
    w.put_f64(c.last_merge_distance);
  }

  put_set(w, state.old_classes);
  put_set(w, state.seen_classes);
  w.put_u64(state.history.size());
  for (const auto& s : state.history) {
    w.put_i32(s.session);
    w.put_i32(s.heads_added);
    put_bool(w, s.k_estimated);
    put_bool(w, s.true_classes.has_value());
    w.put_i32(s.true_classes.value_or(0));
    put_opt_f64(w, s.pseudo_label_acc);
    put_bool(w, s.accuracy.has_value());
    if (s.accuracy) put_accuracy(w, *s.accuracy);
  }
  return w.bytes();
}

RunState decode_run_state(std::span<const std::uint8_t> bytes) {
  dataio::ByteReader r(bytes);
  if (r.get_bytes(4) != kMagic) throw FormatError("state: bad magic", 0);
  const std::size_t version_at = r.offset();
  if (r.get_u16() != kVersion) throw FormatError("state: unsupported version", version_at);

  RunState state;
  state.session_cursor = r.get_i32();
  state.seed = r.get_u64();
  state.memory = memory::decode_memory(r);
  state.head = classifier::decode_head(r);
  state.mapping = eval::decode_mapping(r);

  if (get_bool(r)) {
    clustering::MergeCalibration c;
    c.d_min = r.get_f64();
    c.overcluster_factor = r.get_i32();
    c.source_class_count = r.get_i32();
    const std::size_t rule_at = r.offset();
    const auto rule = r.get_u16();
    if (rule > 1) throw FormatError("state: bad d_min rule", rule_at);
    c.rule = static_cast<clustering::DminRule>(rule);
    c.min_pairwise_distance = r.get_f64();
    c.last_merge_distance = r.get_f64();
    state.calibration = c;
  }

  state.old_classes = get_set(r);
  state.seen_classes = get_set(r);
  const std::size_t count_at = r.offset();
  const auto n = r.get_u64();
  if (n > r.remaining()) throw FormatError("state: history size exceeds input", count_at);
  for (std::uint64_t i = 0; i < n; ++i) {
    eval::SessionMetrics s;
    s.session = r.get_i32();
    s.heads_added = r.get_i32();
    s.k_estimated = get_bool(r);
    const bool has_true = get_bool(r);
    const auto t = r.get_i32();
    if (has_true) s.true_classes = t;
    s.pseudo_label_acc = get_opt_f64(r);
    if (get_bool(r)) s.accuracy = get_accuracy(r);
    state.history.push_back(s);
  }
  r.expect_end();

  if (state.head.num_classes() != state.memory.size() || state.mapping.head_count() != state.memory.size()) {
    throw FormatError("state: head, memory and mapping sizes disagree", r.offset());
  }
  return state;
}

void save_run_state(const RunState& state, const std::filesystem::path& path) {
  dataio::write_file(path, encode_run_state(state));
}

RunState load_run_state(const std::filesystem::path& path) {
  const auto bytes = dataio::read_file(path);
  try {
    return decode_run_state(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.reason(), e.offset());
  }
}

}  // namespace fccd::pipeline
