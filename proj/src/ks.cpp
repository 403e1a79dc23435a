#include "variata/ks.hpp"

#include <algorithm>
#include <cmath>

#include "variata/error.hpp"

namespace variata {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Marsaglia, Tsang & Wang (2003): P(D_n < d) via the k-th power of an
// m x m matrix, with explicit exponent tracking to avoid overflow.
double mtw(int n, double d) {
  int k = static_cast<int>(n * d) + 1;
  int m = 2 * k - 1;
  double h = k - n * d;
  std::vector<double> H(static_cast<std::size_t>(m) * m);
  auto at = [&](std::vector<double>& M, int i, int j) -> double& { return M[static_cast<std::size_t>(i) * m + j]; };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) at(H, i, j) = (i - j + 1 < 0) ? 0.0 : 1.0;
  for (int i = 0; i < m; ++i) {
    at(H, i, 0) -= std::pow(h, i + 1);
    at(H, m - 1, i) -= std::pow(h, m - i);
  }
  at(H, m - 1, 0) += (2 * h - 1 > 0) ? std::pow(2 * h - 1, m) : 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 > 0)
        for (int g = 1; g <= i - j + 1; ++g) at(H, i, j) /= g;

  auto mul = [&](const std::vector<double>& A, const std::vector<double>& B) {
    std::vector<double> C(A.size(), 0.0);
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < m; ++l) {
        double a = A[static_cast<std::size_t>(i) * m + l];
        if (a == 0.0) continue;
        for (int j = 0; j < m; ++j) C[static_cast<std::size_t>(i) * m + j] += a * B[static_cast<std::size_t>(l) * m + j];
      }
    return C;
  };
  // Repeated squaring with a shared exponent.
  std::vector<double> result;
  int result_e = 0;
  std::vector<double> base = H;
  int base_e = 0;
  int p = n;
  bool have = false;
  while (p > 0) {
    if (p & 1) {
      if (!have) {
        result = base;
        result_e = base_e;
        have = true;
      } else {
        result = mul(result, base);
        result_e += base_e;
      }
      double c = result[static_cast<std::size_t>(k - 1) * m + k - 1];
      if (c > 1e140) {
        for (double& v : result) v *= 1e-140;
        result_e += 140;
      }
    }
    p >>= 1;
    if (p > 0) {
      base = mul(base, base);
      base_e *= 2;
      double c = base[static_cast<std::size_t>(k - 1) * m + k - 1];
      if (c > 1e140) {
        for (double& v : base) v *= 1e-140;
        base_e += 140;
      }
    }
  }
  double s = result[static_cast<std::size_t>(k - 1) * m + k - 1];
  for (int i = 1; i <= n; ++i) {
    s = s * i / n;
    if (s < 1e-140) {
      s *= 1e140;
      result_e -= 140;
    }
  }
  return s * std::pow(10.0, result_e);
}

// Limiting distribution: P(K <= x) = 1 - 2 sum (-1)^{j-1} exp(-2 j^2 x^2).
double kolmogorov_cdf(double x) {
  if (x <= 0) return 0.0;
  if (x < 1.18) {
    double s = 0.0;
    double y = -kPi * kPi / (8 * x * x);
    for (int j = 1; j <= 50; j += 2) s += std::exp(j * j * y);
    return std::sqrt(2 * kPi) / x * s;
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double t = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 ? 1.0 : -1.0) * t;
    if (t < 1e-300) break;
  }
  return 1.0 - 2.0 * s;
}

}  // namespace

double ks_cdf(int n, double d) {
  if (n < 1) throw Error("KS needs at least one observation");
  if (d <= 0) return 0.0;
  if (d >= 1) return 1.0;
  if (n <= 200) return std::clamp(mtw(n, d), 0.0, 1.0);
  double sn = std::sqrt(static_cast<double>(n));
  return std::clamp(kolmogorov_cdf((sn + 0.12 + 0.11 / sn) * d), 0.0, 1.0);
}

double ks_critical(int n, double alpha) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (1.0 - ks_cdf(n, mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

KsResult ks_uniform(std::vector<double> x) {
  if (x.empty()) throw Error("KS test on an empty sample");
  std::sort(x.begin(), x.end());
  double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = std::clamp(x[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  KsResult r;
  r.d = d;
  r.exact = x.size() <= 200;
  r.p = std::clamp(1.0 - ks_cdf(static_cast<int>(x.size()), d), 0.0, 1.0);
  return r;
}

}  // namespace variata
