#pragma once

#include <vector>

namespace variata {

// Two-sided one-sample Kolmogorov-Smirnov test against Uniform[0, 1].
struct KsResult {
  double d = 0.0;  // sup |F_n - F|
  double p = 1.0;
  bool exact = false;
};

// P(D_n < d) for the two-sided statistic. Exact (Marsaglia-Tsang-Wang matrix
// power) for n <= 200, the limiting Kolmogorov distribution with the
// Stephens small-sample correction beyond.
double ks_cdf(int n, double d);
// Smallest d with P(D_n >= d) <= alpha.
double ks_critical(int n, double alpha);
KsResult ks_uniform(std::vector<double> x);

}  // namespace variata
