#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "semtype/series.hpp"

namespace semtype {

// Per-label signature vectors: each is the mean of a seeded sample of up to
// `samples_per_label` DF vectors of that label.
struct SignatureSet {
  Eigen::MatrixXd signatures;  // K x d, row per label id
  std::vector<int> sample_counts;
  std::uint64_t seed = 0;
};

// dot(x, y) / (||x|| ||y||), clamped to [-1, 1] against rounding.
double cosine_similarity(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

SignatureSet build_signatures(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                              int num_labels, int samples_per_label = 20, std::uint64_t seed = 0);

// The CD feature matrix: cell (i, j) is the cosine similarity between
// instance i and the signature of label j. Zero-norm instances produce a
// zero row and a warning on the given stream.
Eigen::MatrixXd cd_features(const Eigen::MatrixXd& features, const SignatureSet& signatures,
                            std::vector<std::string>* warnings = nullptr);

struct PolarRow {
  std::string label;
  std::string reference;
  double similarity = 0.0;
  double angle_deg = 0.0;
};

// Signature-vs-signature similarity to one reference label, expressed as an
// angle; sorted ascending by angle (the reference itself sits at 0 degrees).
std::vector<PolarRow> label_polar_table(const SignatureSet& signatures, const LabelTable& labels,
                                        int reference_label = 0);

std::string polar_table_csv(const std::vector<PolarRow>& rows);

}  // namespace semtype
