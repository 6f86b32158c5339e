#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace semtype {

// Rows are true labels, columns predicted.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;
  int num_classes() const { return static_cast<int>(counts.rows()); }
  long total() const { return counts.sum(); }
};

struct MetricReport {
  std::vector<double> precision;  // per class, 0/0 -> 0
  std::vector<double> recall;
  std::vector<double> f_score;
  double macro_f = 0.0;
  double micro_f = 0.0;  // equals accuracy for single-label multiclass
  double accuracy = 0.0;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int k);

MetricReport f_scores(const ConfusionMatrix& cm);

// Fraction of instances that belong to the majority class of their cluster.
double purity(const std::vector<int>& assignments, const std::vector<int>& y_true);

// Size-weighted average of per-cluster class entropy, in bits.
double entropy(const std::vector<int>& assignments, const std::vector<int>& y_true);

// Serialization used by the CLI: per-class table as CSV, full report as JSON.
std::string metric_report_csv(const MetricReport& report, const std::vector<std::string>& names);
std::string metric_report_json(const MetricReport& report, const std::vector<std::string>& names);

}  // namespace semtype
