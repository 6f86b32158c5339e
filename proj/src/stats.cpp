#include "semtype/stats.hpp"

#include <algorithm>
#include <cmath>

#include "semtype/error.hpp"

namespace semtype {

namespace {

struct Moments {
  double mean;
  double m2;  // population variance
};

Moments central_moments(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  const double m2 = (x.array() - mean).square().mean();
  return {mean, m2};
}

// Drift score shared by describe() and stationarity_ordinal(); valid for any
// n >= 3, the public entry point enforces its own length floor.
int drift_score(const Eigen::VectorXd& x, const StationarityParams& params) {
  const Eigen::Index n = x.size();
  const Eigen::Index seg = n / 3;
  const Eigen::Index starts[3] = {0, seg, 2 * seg};
  const Eigen::Index lens[3] = {seg, seg, n - 2 * seg};

  double mu_min = 0, mu_max = 0, v_min = 0, v_max = 0;
  for (int s = 0; s < 3; ++s) {
    const auto m = central_moments(x.segment(starts[s], lens[s]));
    if (s == 0) {
      mu_min = mu_max = m.mean;
      v_min = v_max = m.m2;
    } else {
      mu_min = std::min(mu_min, m.mean);
      mu_max = std::max(mu_max, m.mean);
      v_min = std::min(v_min, m.m2);
      v_max = std::max(v_max, m.m2);
    }
  }
  const auto global = central_moments(x);
  const double drift_m = (mu_max - mu_min) / (std::sqrt(global.m2) + 1e-12);
  const double drift_v = (v_max - v_min) / (global.m2 + 1e-12);

  if (drift_m > params.unstable_above || drift_v > params.unstable_above) return 0;
  if (drift_m < params.stable_below && drift_v < params.stable_below) return 2;
  return 1;
}

}  // namespace

Eigen::Matrix<double, 6, 1> DfVector::as_vector() const {
  Eigen::Matrix<double, 6, 1> v;
  v << mean, std_dev, variance, static_cast<double>(stationarity), kurtosis, skewness;
  return v;
}

DfVector describe(const Eigen::VectorXd& x, const StationarityParams& params) {
  const Eigen::Index n = x.size();
  if (n < 4) raise(Err::TooShort, "describe needs at least 4 points");

  const double mean = x.mean();
  const Eigen::ArrayXd centered = x.array() - mean;
  const double m2 = centered.square().mean();

  DfVector out;
  out.mean = mean;
  out.variance = m2;
  out.std_dev = std::sqrt(m2);
  if (m2 > 0.0) {
    const double m3 = centered.cube().mean();
    const double m4 = centered.square().square().mean();
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  out.stationarity = drift_score(x, params);
  return out;
}

DfVector describe(const RegularSeries& series, const StationarityParams& params) {
  return describe(series.values, params);
}

int stationarity_ordinal(const Eigen::VectorXd& x, const StationarityParams& params) {
  if (x.size() < 30) raise(Err::TooShort, "stationarity needs at least 30 points");
  return drift_score(x, params);
}

}  // namespace semtype
