#include "fccd/eval/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "fccd/errors.hpp"

namespace fccd::eval {

Accuracy score_predictions(std::span<const std::int32_t> predicted_heads, const ClusterMapping& mapping,
                           std::span<const std::int32_t> truth, const std::set<std::int32_t>& old_classes) {
  if (predicted_heads.size() != truth.size()) throw PreconditionError("evaluate: length mismatch");
  Accuracy acc;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == kUnlabeled) continue;
    const auto mapped = mapping.truth_of(static_cast<std::size_t>(predicted_heads[i]));
    const bool correct = mapped && *mapped == truth[i];
    if (old_classes.contains(truth[i])) {
      ++acc.n_old;
      acc.correct_old += correct ? 1 : 0;
    } else {
      ++acc.n_new;
      acc.correct_new += correct ? 1 : 0;
    }
  }
  const std::size_t n = acc.n_old + acc.n_new;
  acc.last = n == 0 ? 0.0 : 100.0 * static_cast<double>(acc.correct_old + acc.correct_new) / static_cast<double>(n);
  if (acc.n_old > 0) acc.old_acc = 100.0 * static_cast<double>(acc.correct_old) / static_cast<double>(acc.n_old);
  if (acc.n_new > 0) acc.new_acc = 100.0 * static_cast<double>(acc.correct_new) / static_cast<double>(acc.n_new);
  return acc;
}

Accuracy evaluate(const classifier::LinearHead& head, const ClusterMapping& mapping, const EmbeddingSet& test,
                  const std::set<std::int32_t>& old_classes) {
  if (!test.has_labels()) throw PreconditionError("evaluate: test set needs labels");
  const auto predicted = classifier::predict(head, test.data);
  return score_predictions(predicted, mapping, *test.labels, old_classes);
}

double round1(double pct) { return std::round(pct * 10.0) / 10.0; }

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(round1(*v)) : nlohmann::json(nullptr);
}

nlohmann::json accuracy_json(const Accuracy& a) {
  return {{"last", round1(a.last)}, {"old", opt_json(a.old_acc)}, {"new", opt_json(a.new_acc)},
          {"n_old", a.n_old},       {"n_new", a.n_new}};
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << round1(*v);
  return os.str();
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json doc;
  doc["flags"] = {{"sa", report.sa}, {"gr", report.gr}, {"ln", report.ln}};
  doc["sessions"] = nlohmann::json::array();
  for (const auto& s : report.sessions) {
    nlohmann::json rec{{"session", s.session},
                       {"heads_added", s.heads_added},
                       {"k_estimated", s.k_estimated},
                       {"true_classes", s.true_classes ? nlohmann::json(*s.true_classes) : nlohmann::json(nullptr)},
                       {"pseudo_label_acc", opt_json(s.pseudo_label_acc)}};
    rec["accuracy"] = s.accuracy ? accuracy_json(*s.accuracy) : nlohmann::json(nullptr);
    doc["sessions"].push_back(std::move(rec));
  }
  doc["final"] = accuracy_json(report.final_accuracy);
  return doc.dump(2) + "\n";
}

std::string report_to_table(const MetricsReport& report) {
  std::ostringstream os;
  os << "session\theads_added\tk_estimated\ttrue_classes\tpseudo_label_acc\tlast\told\tnew\n";
  for (const auto& s : report.sessions) {
    os << s.session << '\t' << s.heads_added << '\t' << (s.k_estimated ? 1 : 0) << '\t'
       << (s.true_classes ? std::to_string(*s.true_classes) : "NA") << '\t' << cell(s.pseudo_label_acc) << '\t'
       << (s.accuracy ? cell(s.accuracy->last) : "NA") << '\t'
       << (s.accuracy ? cell(s.accuracy->old_acc) : "NA") << '\t'
       << (s.accuracy ? cell(s.accuracy->new_acc) : "NA") << '\n';
  }
  const auto& f = report.final_accuracy;
  os << "final\tNA\tNA\tNA\tNA\t" << cell(f.last) << '\t' << cell(f.old_acc) << '\t' << cell(f.new_acc) << '\n';
  return os.str();
}

}  // namespace fccd::eval
