#include "fccd/dataio/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fccd/errors.hpp"

namespace fccd::dataio {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ValidationError("unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

int positive_int(const json& obj, const char* key, int fallback) {
  const int v = get_or<int>(obj, key, fallback);
  if (v <= 0) throw ValidationError(std::string("\"") + key + "\" must be positive");
  return v;
}

double positive_real(const json& obj, const char* key, double fallback) {
  const double v = get_or<double>(obj, key, fallback);
  if (!(v > 0.0)) throw ValidationError(std::string("\"") + key + "\" must be positive");
  return v;
}

DminRule parse_dmin_rule(const std::string& s) {
  if (s == "min_pairwise") return DminRule::min_pairwise;
  if (s == "last_merge") return DminRule::last_merge;
  throw ValidationError("unknown dmin_rule \"" + s + "\" (expected min_pairwise or last_merge)");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::string_view dmin_rule_name(DminRule rule) {
  return rule == DminRule::min_pairwise ? "min_pairwise" : "last_merge";
}

void validate_manifest(const SessionManifest& m) {
  if (m.sessions.empty()) throw ValidationError("manifest has no sessions");
  if (!m.sessions.front().labeled) throw ValidationError("the first session must be labeled");
  for (std::size_t i = 1; i < m.sessions.size(); ++i) {
    if (m.sessions[i].labeled) {
      throw ValidationError("only the first session may be labeled (session " + std::to_string(i) + " is)");
    }
  }
  for (std::size_t i = 0; i < m.sessions.size(); ++i) {
    const auto& s = m.sessions[i];
    if (s.class_count && *s.class_count <= 0) {
      throw ValidationError("session " + std::to_string(i) + " has non-positive class_count");
    }
    if (!m.options.estimate_k && !s.class_count) {
      throw ValidationError("session " + std::to_string(i) + " lacks class_count while estimate_k is false");
    }
  }
  const auto& o = m.options;
  if (o.overcluster_factor <= 0 || o.replay_per_class <= 0 || o.epochs < 0 || o.batch_size <= 0 ||
      o.kmeans_max_iters <= 0 || o.kmeans_restarts <= 0) {
    throw ValidationError("integer options must be positive");
  }
  if (!(o.tau > 0.0) || !(o.lr0 > 0.0)) throw ValidationError("tau and lr0 must be positive");
  if (o.estimate_upper_bound && *o.estimate_upper_bound <= 0) {
    throw ValidationError("estimate_upper_bound must be positive");
  }
}

SessionManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("manifest root must be an object");
  reject_unknown_keys(doc, {"sessions", "test", "seed", "options"}, "manifest");

  SessionManifest m;
  m.seed = get_or<std::uint64_t>(doc, "seed", 0);
  if (doc.contains("test")) m.test = resolve(base_dir, get_or<std::string>(doc, "test", ""));

  if (!doc.contains("sessions") || !doc["sessions"].is_array()) {
    throw ValidationError("manifest needs a \"sessions\" array");
  }
  for (const auto& s : doc["sessions"]) {
    if (!s.is_object()) throw ValidationError("each session must be an object");
    reject_unknown_keys(s, {"path", "labeled", "class_count"}, "session");
    if (!s.contains("path")) throw ValidationError("session lacks \"path\"");
    SessionEntry e;
    e.path = resolve(base_dir, get_or<std::string>(s, "path", ""));
    e.labeled = get_or<bool>(s, "labeled", false);
    if (s.contains("class_count")) e.class_count = get_or<int>(s, "class_count", 0);
    m.sessions.push_back(std::move(e));
  }

  if (doc.contains("options")) {
    const json& o = doc["options"];
    if (!o.is_object()) throw ValidationError("\"options\" must be an object");
    reject_unknown_keys(o,
                        {"estimate_k", "overcluster_factor", "estimate_upper_bound", "dmin_rule",
                         "replay_per_class", "tau", "epochs", "batch_size", "lr0", "momentum", "bias",
                         "shrinkage", "variance_floor", "kmeans_max_iters", "kmeans_tol",
                         "kmeans_restarts"},
                        "options");
    auto& opt = m.options;
    opt.estimate_k = get_or<bool>(o, "estimate_k", opt.estimate_k);
    opt.overcluster_factor = positive_int(o, "overcluster_factor", opt.overcluster_factor);
    if (o.contains("estimate_upper_bound")) opt.estimate_upper_bound = positive_int(o, "estimate_upper_bound", 1);
    if (o.contains("dmin_rule")) opt.dmin_rule = parse_dmin_rule(get_or<std::string>(o, "dmin_rule", ""));
    opt.replay_per_class = positive_int(o, "replay_per_class", opt.replay_per_class);
    opt.tau = positive_real(o, "tau", opt.tau);
    opt.epochs = get_or<int>(o, "epochs", opt.epochs);
    opt.batch_size = positive_int(o, "batch_size", opt.batch_size);
    opt.lr0 = positive_real(o, "lr0", opt.lr0);
    opt.momentum = get_or<double>(o, "momentum", opt.momentum);
    opt.bias = get_or<bool>(o, "bias", opt.bias);
    opt.shrinkage = get_or<double>(o, "shrinkage", opt.shrinkage);
    opt.variance_floor = positive_real(o, "variance_floor", opt.variance_floor);
    opt.kmeans_max_iters = positive_int(o, "kmeans_max_iters", opt.kmeans_max_iters);
    opt.kmeans_tol = get_or<double>(o, "kmeans_tol", opt.kmeans_tol);
    opt.kmeans_restarts = positive_int(o, "kmeans_restarts", opt.kmeans_restarts);
    if (opt.momentum < 0.0 || opt.momentum >= 1.0) throw ValidationError("momentum must be in [0, 1)");
    if (opt.shrinkage < 0.0 || opt.shrinkage > 1.0) throw ValidationError("shrinkage must be in [0, 1]");
    if (opt.kmeans_tol < 0.0) throw ValidationError("kmeans_tol must be non-negative");
  }

  validate_manifest(m);
  return m;
}

SessionManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

std::string dump_manifest(const SessionManifest& m) {
  json doc;
  doc["seed"] = m.seed;
  if (m.test) doc["test"] = m.test->generic_string();
  doc["sessions"] = json::array();
  for (const auto& s : m.sessions) {
    json e{{"path", s.path.generic_string()}, {"labeled", s.labeled}};
    if (s.class_count) e["class_count"] = *s.class_count;
    doc["sessions"].push_back(std::move(e));
  }
  const auto& o = m.options;
  json opt{{"estimate_k", o.estimate_k},
           {"overcluster_factor", o.overcluster_factor},
           {"dmin_rule", std::string(dmin_rule_name(o.dmin_rule))},
           {"replay_per_class", o.replay_per_class},
           {"tau", o.tau},
           {"epochs", o.epochs},
           {"batch_size", o.batch_size},
           {"lr0", o.lr0},
           {"momentum", o.momentum},
           {"bias", o.bias},
           {"shrinkage", o.shrinkage},
           {"variance_floor", o.variance_floor},
           {"kmeans_max_iters", o.kmeans_max_iters},
           {"kmeans_tol", o.kmeans_tol},
           {"kmeans_restarts", o.kmeans_restarts}};
  if (o.estimate_upper_bound) opt["estimate_upper_bound"] = *o.estimate_upper_bound;
  doc["options"] = std::move(opt);
  return doc.dump(2) + "\n";
}

}  // namespace fccd::dataio
