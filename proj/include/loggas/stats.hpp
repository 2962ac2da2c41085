#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace loggas {

// regularized upper incomplete gamma Q(a,x), series/continued fraction split
// at x = a+1 (Numerical Recipes style)
inline double gammq(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gammq: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    double ap = a, del = 1.0 / a, sum = del;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15)
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("gammq: series did not converge");
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("gammq: continued fraction did not converge");
}

// survival function of chi^2 with df degrees of freedom
inline double chi2_sf(double x, double df) { return gammq(0.5 * df, 0.5 * x); }

struct Moments {
  double mean = 0.0;
  double var = 0.0; // unbiased
  long n = 0;
  double stderr_mean() const { return n > 0 ? std::sqrt(var / n) : 0.0; }
};

inline Moments sample_moments(const std::vector<double>& xs) {
  Moments m;
  m.n = static_cast<long>(xs.size());
  if (m.n == 0) return m;
  double s = 0.0;
  for (double x : xs) s += x;
  m.mean = s / m.n;
  if (m.n > 1) {
    double q = 0.0;
    for (double x : xs) q += (x - m.mean) * (x - m.mean);
    m.var = q / (m.n - 1);
  }
  return m;
}

} // namespace loggas
