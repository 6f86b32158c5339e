// Test-only reference implementations, written independently of the library
// code paths they check: plain loops and maps, no shared helpers.
#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

namespace oracles {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // excess
};

inline Moments naive_moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  Moments m;
  for (const double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (const double v : x) {
    const double d = v - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2;
  m.std_dev = std::sqrt(m2);
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

// Two-pointer linear interpolation over NaN gaps with edge extension.
inline std::vector<double> reference_interpolate(std::vector<double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isnan(v[i])) known.push_back(i);
  }
  for (std::size_t i = 0; i < known.front(); ++i) v[i] = v[known.front()];
  for (std::size_t i = known.back() + 1; i < n; ++i) v[i] = v[known.back()];
  for (std::size_t g = 0; g + 1 < known.size(); ++g) {
    const std::size_t a = known[g];
    const std::size_t b = known[g + 1];
    for (std::size_t k = a + 1; k < b; ++k) {
      v[k] = v[a] + (v[b] - v[a]) * static_cast<double>(k - a) / static_cast<double>(b - a);
    }
  }
  return v;
}

// O(N^2) pairwise distances of the 2-D delay embedding, straight from the
// raw window values.
inline std::vector<std::vector<double>> brute_distance_matrix(const std::vector<double>& window,
                                                              int tau) {
  const std::size_t n = window.size() - static_cast<std::size_t>(tau);
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = window[i] - window[j];
      const double dy = window[i + static_cast<std::size_t>(tau)] -
                        window[j + static_cast<std::size_t>(tau)];
      d[i][j] = std::sqrt(dx * dx + dy * dy);
    }
  }
  return d;
}

// Near-equal contiguous partition: first (n mod d) blocks one element larger.
inline std::vector<int> reference_block_sizes(int n, int d) {
  std::vector<int> sizes(static_cast<std::size_t>(d), n / d);
  for (int b = 0; b < n % d; ++b) sizes[static_cast<std::size_t>(b)] += 1;
  return sizes;
}

inline double brute_purity(const std::vector<int>& clusters, const std::vector<int>& classes) {
  std::map<int, std::map<int, int>> tally;
  for (std::size_t i = 0; i < clusters.size(); ++i) tally[clusters[i]][classes[i]] += 1;
  int hits = 0;
  for (const auto& [cluster, members] : tally) {
    int best = 0;
    for (const auto& [cls, count] : members) {
      if (count > best) best = count;
    }
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(clusters.size());
}

inline double brute_entropy(const std::vector<int>& clusters, const std::vector<int>& classes) {
  std::map<int, std::map<int, int>> tally;
  std::map<int, int> sizes;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    tally[clusters[i]][classes[i]] += 1;
    sizes[clusters[i]] += 1;
  }
  double total = 0.0;
  for (const auto& [cluster, members] : tally) {
    double h = 0.0;
    for (const auto& [cls, count] : members) {
      const double p = static_cast<double>(count) / static_cast<double>(sizes[cluster]);
      h -= p * std::log2(p);
    }
    total += h * static_cast<double>(sizes[cluster]) / static_cast<double>(clusters.size());
  }
  return total;
}

struct BruteF {
  std::vector<double> f;  // per class
  double macro = 0.0;
  double micro = 0.0;
  double accuracy = 0.0;
};

inline BruteF brute_f_scores(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                             int k) {
  BruteF out;
  long correct = 0;
  double pooled_tp = 0.0;
  double pooled_fp = 0.0;
  double pooled_fn = 0.0;
  for (int c = 0; c < k; ++c) {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      if (y_pred[i] == c && y_true[i] == c) ++tp;
      if (y_pred[i] == c && y_true[i] != c) ++fp;
      if (y_pred[i] != c && y_true[i] == c) ++fn;
    }
    const double prec = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    const double f = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    out.f.push_back(f);
    out.macro += f / static_cast<double>(k);
    pooled_tp += static_cast<double>(tp);
    pooled_fp += static_cast<double>(fp);
    pooled_fn += static_cast<double>(fn);
  }
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == y_pred[i]) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
  const double micro_p = pooled_tp / (pooled_tp + pooled_fp);
  const double micro_r = pooled_tp / (pooled_tp + pooled_fn);
  out.micro = micro_p + micro_r > 0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  return out;
}

inline double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Student t CDF by Simpson integration of the density (independent of the
// incomplete-beta route used by the library).
inline double t_cdf_simpson(double t, double nu) {
  const double coeff = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                       std::sqrt(nu * std::acos(-1.0));
  const auto density = [&](double x) {
    return coeff * std::pow(1.0 + x * x / nu, -0.5 * (nu + 1.0));
  };
  const double hi = std::abs(t);
  const int steps = 20000;
  const double h = hi / steps;
  double integral = density(0.0) + density(hi);
  for (int i = 1; i < steps; ++i) {
    integral += density(h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  integral *= h / 3.0;
  return t >= 0.0 ? 0.5 + integral : 0.5 - integral;
}

// Biased sample autocorrelation at the given lag.
inline double autocorrelation(const std::vector<double>& x, int lag) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < n; ++i) {
    num += (x[i] - mean) * (x[i + static_cast<std::size_t>(lag)] - mean);
  }
  for (const double v : x) den += (v - mean) * (v - mean);
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace oracles
