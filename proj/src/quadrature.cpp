#include "loggas/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace loggas {

namespace {

// Recurrence coefficients for monic Jacobi polynomials with weight
// (1-x)^a (1+x)^b (Gautschi, "Orthogonal Polynomials", r_jacobi):
//   alpha_0 = (b-a)/(a+b+2)
//   alpha_k = (b^2-a^2) / ((2k+a+b)(2k+a+b+2)),            k >= 1
//   beta_1  = 4(a+1)(b+1) / ((a+b+2)^2 (a+b+3))
//   beta_k  = 4k(k+a)(k+b)(k+a+b) /
//             ((2k+a+b)^2 (2k+a+b+1)(2k+a+b-1)),           k >= 2
// mu0 = 2^{a+b+1} Gamma(a+1) Gamma(b+1) / Gamma(a+b+2).
QuadRule compute_gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
  if (a <= -1.0 || b <= -1.0)
    throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");

  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
  double ab = a + b;
  diag(0) = (b - a) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    double t = 2.0 * k + ab;
    diag(k) = (b * b - a * a) / (t * (t + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    double bk;
    if (k == 1) {
      bk = 4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      double t = 2.0 * k + ab;
      bk = 4.0 * k * (k + a) * (k + b) * (k + ab) /
           (t * t * (t + 1.0) * (t - 1.0));
    }
    sub(k - 1) = std::sqrt(bk);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n > 1 ? n - 1 : 0));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_jacobi: tridiagonal eigensolve failed");

  double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                        std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));

  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0;
  }
  return r;
}

} // namespace

const QuadRule& gauss_jacobi(int n, double a, double b) {
  static std::map<std::tuple<int, double, double>, QuadRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_tuple(n, a, b);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, compute_gauss_jacobi(n, a, b)).first;
  return it->second;
}

} // namespace loggas
