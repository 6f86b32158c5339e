#pragma once

#include <Eigen/Core>

#include "semtype/series.hpp"

namespace semtype {

// The six descriptive features (DF family), in the fixed order used for
// feature vectors: mean, std, variance, stationarity, kurtosis, skewness.
struct DfVector {
  double mean = 0.0;
  double std_dev = 0.0;
  double variance = 0.0;
  int stationarity = 0;  // ordinal 0..2, 2 = most stationary
  double kurtosis = 0.0;  // excess
  double skewness = 0.0;

  Eigen::Matrix<double, 6, 1> as_vector() const;
  static constexpr int kDim = 6;
};

// Thresholds of the three-segment drift test behind the ordinal stationarity
// score. Both drifts are scale-normalized, so the score is affine-invariant.
struct StationarityParams {
  double stable_below = 0.5;
  double unstable_above = 2.0;
};

// Population moments; skewness m3/m2^1.5, excess kurtosis m4/m2^2 - 3, both
// defined as 0 on zero-variance input. Needs at least 4 points.
DfVector describe(const Eigen::VectorXd& values, const StationarityParams& params = {});
DfVector describe(const RegularSeries& series, const StationarityParams& params = {});

// Splits the series into 3 contiguous segments (remainder to the last) and
// scores mean/variance drift: 2 when both drifts are small, 0 when either is
// large, 1 in between. Needs at least 30 points.
int stationarity_ordinal(const Eigen::VectorXd& values, const StationarityParams& params = {});

}  // namespace semtype
