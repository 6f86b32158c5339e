#include "semtype/ttest.hpp"

#include <cmath>
#include <limits>

#include "semtype/error.hpp"

namespace semtype {

namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

struct SampleStats {
  double mean;
  double var;  // unbiased
  std::size_t n;
};

SampleStats sample_stats(const std::vector<double>& v) {
  const std::size_t n = v.size();
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  return {mean, var, n};
}

}  // namespace

double student_t_cdf(double t, double nu) {
  if (t == 0.0) return 0.5;
  const double x = nu / (nu + t * t);
  const double tail = 0.5 * reg_inc_beta(0.5 * nu, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    raise(Err::TooFewSamples, "welch test needs at least 2 samples per side");
  }
  const SampleStats sa = sample_stats(a);
  const SampleStats sb = sample_stats(b);
  const double se2 = sa.var / static_cast<double>(sa.n) + sb.var / static_cast<double>(sb.n);

  WelchResult out;
  if (se2 <= 0.0) {
    // Degenerate zero-variance samples: identical means are indistinguishable,
    // distinct means separate with certainty.
    out.t = sa.mean == sb.mean ? 0.0 : std::numeric_limits<double>::infinity() *
                                           (sa.mean > sb.mean ? 1.0 : -1.0);
    out.df = static_cast<double>(sa.n + sb.n - 2);
    out.p = sa.mean == sb.mean ? 1.0 : 0.0;
    return out;
  }
  out.t = (sa.mean - sb.mean) / std::sqrt(se2);
  const double va_n = sa.var / static_cast<double>(sa.n);
  const double vb_n = sb.var / static_cast<double>(sb.n);
  out.df = se2 * se2 /
           (va_n * va_n / static_cast<double>(sa.n - 1) +
            vb_n * vb_n / static_cast<double>(sb.n - 1));
  out.p = 2.0 * (1.0 - student_t_cdf(std::abs(out.t), out.df));
  return out;
}

bool significance_mark(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
  const WelchResult r = welch_t_test(a, b);
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (const double x : a) mean_a += x;
  for (const double x : b) mean_b += x;
  mean_a /= static_cast<double>(a.size());
  mean_b /= static_cast<double>(b.size());
  return r.p < alpha && mean_a > mean_b;
}

}  // namespace semtype
