#pragma once

#include <vector>

namespace semtype {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// CDF of Student's t with nu degrees of freedom, via the regularized
// incomplete beta function.
double student_t_cdf(double t, double nu);

// Welch's two-sample t-test (unequal variances), two-sided p-value with
// Welch-Satterthwaite degrees of freedom.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// True iff sample a is significantly greater than sample b at level alpha.
bool significance_mark(const std::vector<double>& a, const std::vector<double>& b,
                       double alpha = 0.05);

}  // namespace semtype
