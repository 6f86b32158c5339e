#include "semtype/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semtype/csv.hpp"
#include "semtype/error.hpp"
#include "semtype/rng.hpp"

namespace semtype {

double cosine_similarity(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) raise(Err::LengthMismatch, "vectors differ in length");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) raise(Err::ZeroVector, "cosine undefined for a zero vector");
  return std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
}

SignatureSet build_signatures(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                              int num_labels, int samples_per_label, std::uint64_t seed) {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    raise(Err::LengthMismatch, "feature rows and labels differ in length");
  }
  std::vector<std::vector<Eigen::Index>> by_label(static_cast<std::size_t>(num_labels));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_label[static_cast<std::size_t>(labels[i])].push_back(static_cast<Eigen::Index>(i));
  }

  SignatureSet out;
  out.seed = seed;
  out.signatures = Eigen::MatrixXd::Zero(num_labels, features.cols());
  out.sample_counts.resize(static_cast<std::size_t>(num_labels));
  for (int label = 0; label < num_labels; ++label) {
    const auto& members = by_label[static_cast<std::size_t>(label)];
    if (members.empty()) {
      raise(Err::EmptyLabel, "label " + std::to_string(label) + " has no instances");
    }
    const std::size_t take =
        std::min<std::size_t>(members.size(), static_cast<std::size_t>(samples_per_label));
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    const auto picks = rng.sample_without_replacement(members.size(), take);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(features.cols());
    for (const std::size_t p : picks) mean += features.row(members[p]);
    out.signatures.row(label) = mean / static_cast<double>(take);
    out.sample_counts[static_cast<std::size_t>(label)] = static_cast<int>(take);
  }
  return out;
}

Eigen::MatrixXd cd_features(const Eigen::MatrixXd& features, const SignatureSet& signatures,
                            std::vector<std::string>* warnings) {
  if (features.cols() != signatures.signatures.cols()) {
    raise(Err::LengthMismatch, "signature length does not match feature length");
  }
  const Eigen::Index m = features.rows();
  const Eigen::Index k = signatures.signatures.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double ni = features.row(i).norm();
    if (ni == 0.0) {
      if (warnings) warnings->push_back("instance " + std::to_string(i) + " has a zero DF vector");
      continue;  // row stays 0
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      const double nj = signatures.signatures.row(j).norm();
      if (nj == 0.0) {
        if (warnings) warnings->push_back("label " + std::to_string(j) + " has a zero signature");
        continue;
      }
      out(i, j) = std::clamp(features.row(i).dot(signatures.signatures.row(j)) / (ni * nj),
                             -1.0, 1.0);
    }
  }
  return out;
}

std::vector<PolarRow> label_polar_table(const SignatureSet& signatures, const LabelTable& labels,
                                        int reference_label) {
  const int k = static_cast<int>(signatures.signatures.rows());
  if (k < 2) raise(Err::BadSpec, "polar table needs at least 2 labels");
  if (reference_label < 0 || reference_label >= k) {
    raise(Err::LabelOutOfRange, "reference label out of range");
  }
  const Eigen::VectorXd ref = signatures.signatures.row(reference_label);
  std::vector<PolarRow> rows;
  rows.reserve(static_cast<std::size_t>(k));
  for (int label = 0; label < k; ++label) {
    PolarRow row;
    row.label = labels.name_of(label);
    row.reference = labels.name_of(reference_label);
    row.similarity = cosine_similarity(signatures.signatures.row(label), ref);
    row.angle_deg = std::acos(row.similarity) * 180.0 / std::numbers::pi;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const PolarRow& a, const PolarRow& b) { return a.angle_deg < b.angle_deg; });
  return rows;
}

std::string polar_table_csv(const std::vector<PolarRow>& rows) {
  std::string out = "label,reference,similarity,angle_deg\n";
  for (const auto& row : rows) {
    out += row.label + "," + row.reference + "," + format_double(row.similarity, 10) + "," +
           format_double(row.angle_deg, 10) + "\n";
  }
  return out;
}

}  // namespace semtype
