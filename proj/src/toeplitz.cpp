#include "loggas/toeplitz.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "loggas/csvio.hpp"
#include "loggas/quadrature.hpp"

namespace loggas {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// accumulate sum_i F_i e^{-ik theta_i} into c[k], k = 0..kmax
void accumulate_modes(const std::vector<double>& theta,
                      const std::vector<double>& F, int kmax,
                      std::vector<cplx>& c) {
  for (size_t i = 0; i < theta.size(); ++i) {
    cplx step = std::polar(1.0, -theta[i]);
    cplx ph = 1.0;
    for (int k = 0; k <= kmax; ++k) {
      c[k] += F[i] * ph;
      ph *= step;
    }
  }
}

std::vector<cplx> continuum_pass(const FHSymbol& f, int kmax, int order) {
  std::vector<cplx> c(kmax + 1, 0.0);
  const auto& sg = f.singularities();
  std::vector<double> theta, F;
  size_t m = sg.size();
  for (size_t j = 0; j < m; ++j) {
    double a = sg[j].theta;
    double b = (j + 1 < m) ? sg[j + 1].theta : sg[0].theta + kTwoPi;
    double h = 0.5 * (b - a);
    // one Gauss-Jacobi panel against each end of the gap; the |theta-theta_j|^beta
    // factor is folded into the node weights, f is sampled raw
    for (int end = 0; end < 2; ++end) {
      double beta = (end == 0) ? sg[j].beta : sg[(j + 1) % m].beta;
      double anchor = (end == 0) ? a : b;
      double dir = (end == 0) ? 1.0 : -1.0;
      const QuadRule& rule = gauss_jacobi(order, 0.0, beta);
      double scale = std::pow(0.5 * h, beta + 1.0);
      for (int i = 0; i < order; ++i) {
        double t = 0.5 * h * (1.0 + rule.x[i]);
        double th = anchor + dir * t;
        theta.push_back(th);
        F.push_back(scale * rule.w[i] / std::pow(t, beta) * f.eval_on_circle(th));
      }
    }
  }
  accumulate_modes(theta, F, kmax, c);
  for (cplx& v : c) v /= kTwoPi;
  return c;
}

std::vector<cplx> trapezoid_pass(const FHSymbol& f, int kmax, int n) {
  std::vector<cplx> c(kmax + 1, 0.0);
  std::vector<double> theta(n), F(n);
  for (int l = 0; l < n; ++l) {
    theta[l] = kTwoPi * l / n;
    F[l] = f.eval_on_circle(theta[l]) / n;
  }
  accumulate_modes(theta, F, kmax, c);
  return c;
}

double mode_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

} // namespace

cplx MomentTable::at(long k) const {
  if (kind_ == Kind::discrete) {
    long kr = ((k % M_) + M_) % M_;
    if (kr <= max_order()) return c_[kr];
    if (M_ - kr <= max_order()) return std::conj(c_[M_ - kr]);
    throw std::out_of_range("MomentTable: moment order not stored");
  }
  long ka = std::abs(k);
  if (ka > max_order()) throw std::out_of_range("MomentTable: moment order not stored");
  return k >= 0 ? c_[ka] : std::conj(c_[ka]);
}

MomentTable MomentTable::from_coefficients(std::vector<cplx> c, Kind kind,
                                           long M) {
  if (c.empty()) throw std::invalid_argument("moment table: need c_0");
  if (kind == Kind::discrete && M < static_cast<long>(c.size()))
    throw std::invalid_argument("moment table: more orders than lattice points");
  MomentTable t;
  t.kind_ = kind;
  t.M_ = kind == Kind::discrete ? M : 0;
  t.c_ = std::move(c);
  return t;
}

MomentTable MomentTable::discrete(const FHSymbol& f, long M, int max_order) {
  if (M < 1) throw std::invalid_argument("discrete moments: M must be positive");
  if (max_order < 0) throw std::invalid_argument("discrete moments: negative order");
  std::vector<double> fv(M);
  for (long l = 0; l < M; ++l) fv[l] = f.eval_on_circle(kTwoPi * l / M);
  std::vector<cplx> roots(M);
  for (long m = 0; m < M; ++m) roots[m] = std::polar(1.0, -kTwoPi * m / M);
  MomentTable t;
  t.kind_ = Kind::discrete;
  t.M_ = M;
  t.c_.assign(max_order + 1, 0.0);
  for (int k = 0; k <= max_order; ++k) {
    cplx s = 0.0;
    for (long l = 0; l < M; ++l) s += fv[l] * roots[(k * l) % M];
    t.c_[k] = s / static_cast<double>(M);
  }
  return t;
}

MomentTable MomentTable::continuum(const FHSymbol& f, int max_order, double tol) {
  if (max_order < 0) throw std::invalid_argument("continuum moments: negative order");
  MomentTable t;
  t.kind_ = Kind::continuum;
  if (f.smooth()) {
    int n = 64;
    while (n < 2 * (max_order + f.bandwidth() + 8)) n *= 2;
    std::vector<cplx> prev = trapezoid_pass(f, max_order, n);
    for (; n <= (1 << 20); ) {
      n *= 2;
      std::vector<cplx> cur = trapezoid_pass(f, max_order, n);
      double err = mode_diff(prev, cur);
      prev = std::move(cur);
      if (err <= tol * std::max(1.0, std::abs(prev[0]))) {
        t.c_ = std::move(prev);
        return t;
      }
    }
    throw std::runtime_error("continuum moments: trapezoid refinement did not converge");
  }
  int order = 32;
  std::vector<cplx> prev = continuum_pass(f, max_order, order);
  while (order <= 4096) {
    order *= 2;
    std::vector<cplx> cur = continuum_pass(f, max_order, order);
    double err = mode_diff(prev, cur);
    prev = std::move(cur);
    if (err <= tol * std::max(1.0, std::abs(prev[0]))) {
      t.c_ = std::move(prev);
      return t;
    }
  }
  throw std::runtime_error("continuum moments: panel refinement did not converge");
}

void MomentTable::write_csv(std::ostream& os, bool reproducible) const {
  csv_header(os, "moments", {"k", "re", "im"}, reproducible);
  for (int k = -max_order(); k <= max_order(); ++k) {
    cplx v = at(k);
    os << k << ',' << fmt_g17(v.real()) << ',' << fmt_g17(v.imag()) << '\n';
  }
}

bool LogDet::singular() const { return log_abs == -kInf; }

double LogDet::value() const {
  if (singular()) return 0.0;
  return (phase * std::exp(log_abs)).real();
}

LogDet toeplitz_logdet(const MomentTable& moments, int N) {
  if (N < 0) throw std::invalid_argument("toeplitz_logdet: negative size");
  if (N == 0) return {0.0, 1.0, true};
  Eigen::MatrixXcd T(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) T(j, k) = moments.at(j - k);

  Eigen::LLT<Eigen::MatrixXcd> llt(T);
  if (llt.info() == Eigen::Success) {
    double la = 0.0;
    bool ok = true;
    for (int i = 0; i < N; ++i) {
      double d = llt.matrixLLT()(i, i).real();
      if (d < 1e-150) { ok = false; break; }
      la += 2.0 * std::log(d);
    }
    if (ok) return {la, 1.0, true};
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(T);
  double la = 0.0;
  cplx phase = static_cast<double>(lu.permutationP().determinant());
  for (int i = 0; i < N; ++i) {
    cplx d = lu.matrixLU()(i, i);
    double ad = std::abs(d);
    if (ad < 1e-300) return {-kInf, 1.0, false};
    la += std::log(ad);
    phase *= d / ad;
  }
  return {la, phase, false};
}

LogDet expectation_product(const FHSymbol& f, int N, long M) {
  if (N < 1 || M < N)
    throw std::invalid_argument("expectation_product: need 1 <= N <= M");
  return toeplitz_logdet(MomentTable::discrete(f, M, N - 1), N);
}

double partition_log(int N, long M) {
  return std::lgamma(N + 1.0) + N * std::log(static_cast<double>(M));
}

} // namespace loggas
