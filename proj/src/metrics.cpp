#include "semtype/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "semtype/csv.hpp"
#include "semtype/error.hpp"

namespace semtype {

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int k) {
  if (y_true.size() != y_pred.size()) raise(Err::LengthMismatch, "label sequences differ in length");
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= k || p < 0 || p >= k) raise(Err::LabelOutOfRange, "label outside [0, K)");
    cm.counts(t, p) += 1;
  }
  return cm;
}

MetricReport f_scores(const ConfusionMatrix& cm) {
  const int k = cm.num_classes();
  const long total = cm.total();
  if (total == 0) raise(Err::EmptyMatrix, "confusion matrix holds no instances");

  MetricReport rep;
  rep.precision.resize(static_cast<std::size_t>(k));
  rep.recall.resize(static_cast<std::size_t>(k));
  rep.f_score.resize(static_cast<std::size_t>(k));

  long pooled_tp = 0;
  double macro_sum = 0.0;
  for (int c = 0; c < k; ++c) {
    const long tp = cm.counts(c, c);
    const long fp = cm.counts.col(c).sum() - tp;
    const long fn = cm.counts.row(c).sum() - tp;
    pooled_tp += tp;
    const double prec = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double rec = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double f =
        (prec + rec) == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    rep.precision[static_cast<std::size_t>(c)] = prec;
    rep.recall[static_cast<std::size_t>(c)] = rec;
    rep.f_score[static_cast<std::size_t>(c)] = f;
    macro_sum += f;
  }
  rep.macro_f = macro_sum / static_cast<double>(k);
  rep.accuracy = static_cast<double>(pooled_tp) / static_cast<double>(total);
  // Pooled FP and FN both equal total - TP for single-label prediction, so
  // micro precision = micro recall = accuracy.
  const double pooled_fp = static_cast<double>(total - pooled_tp);
  const double micro_p = static_cast<double>(pooled_tp) / (static_cast<double>(pooled_tp) + pooled_fp);
  rep.micro_f = micro_p;
  return rep;
}

namespace {

// cluster id -> per-class counts
std::map<int, std::map<int, long>> cluster_class_counts(const std::vector<int>& assignments,
                                                        const std::vector<int>& y_true) {
  if (assignments.size() != y_true.size()) {
    raise(Err::LengthMismatch, "assignments and labels differ in length");
  }
  if (assignments.empty()) raise(Err::LengthMismatch, "no instances");
  std::map<int, std::map<int, long>> counts;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    counts[assignments[i]][y_true[i]] += 1;
  }
  return counts;
}

}  // namespace

double purity(const std::vector<int>& assignments, const std::vector<int>& y_true) {
  const auto counts = cluster_class_counts(assignments, y_true);
  long majority_sum = 0;
  for (const auto& [cluster, per_class] : counts) {
    long best = 0;
    for (const auto& [cls, count] : per_class) best = std::max(best, count);
    majority_sum += best;
  }
  return static_cast<double>(majority_sum) / static_cast<double>(assignments.size());
}

double entropy(const std::vector<int>& assignments, const std::vector<int>& y_true) {
  const auto counts = cluster_class_counts(assignments, y_true);
  const double n = static_cast<double>(assignments.size());
  double h = 0.0;
  for (const auto& [cluster, per_class] : counts) {
    long size = 0;
    for (const auto& [cls, count] : per_class) size += count;
    double h_cluster = 0.0;
    for (const auto& [cls, count] : per_class) {
      if (count == 0) continue;
      const double p = static_cast<double>(count) / static_cast<double>(size);
      h_cluster -= p * std::log2(p);
    }
    h += h_cluster * static_cast<double>(size) / n;
  }
  return h;
}

std::string metric_report_csv(const MetricReport& report, const std::vector<std::string>& names) {
  std::string out = "class,precision,recall,f_score\n";
  for (std::size_t c = 0; c < report.f_score.size(); ++c) {
    const std::string name = c < names.size() ? names[c] : std::to_string(c);
    out += name + "," + format_double(report.precision[c], 10) + "," +
           format_double(report.recall[c], 10) + "," + format_double(report.f_score[c], 10) + "\n";
  }
  out += "macro_f,,," + format_double(report.macro_f, 10) + "\n";
  out += "micro_f,,," + format_double(report.micro_f, 10) + "\n";
  out += "accuracy,,," + format_double(report.accuracy, 10) + "\n";
  return out;
}

std::string metric_report_json(const MetricReport& report, const std::vector<std::string>& names) {
  nlohmann::ordered_json j;
  j["classes"] = names;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f_score"] = report.f_score;
  j["macro_f"] = report.macro_f;
  j["micro_f"] = report.micro_f;
  j["accuracy"] = report.accuracy;
  return j.dump(2) + "\n";
}

}  // namespace semtype
