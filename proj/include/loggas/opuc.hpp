#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "loggas/toeplitz.hpp"

namespace loggas {

// Orthonormal polynomials phi_0..phi_n on the unit circle for the measure
// behind a moment table, built by the Levinson recursion on the Toeplitz
// moment matrix.  Stores Verblunsky coefficients alpha_0..alpha_{n-1}
// (all |alpha_k| < 1) and leading coefficients chi_0..chi_n > 0.
class OPUCBasis {
public:
  // needs moments up to order n
  static OPUCBasis build(const MomentTable& moments, int n);

  int degree() const { return static_cast<int>(verblunsky_.size()); }
  const std::vector<cplx>& verblunsky() const { return verblunsky_; }
  const std::vector<double>& chi() const { return chi_; }

  // phi_k(z), phi*_k(z) for k = 0..n via the Szego recurrence;
  // phi and phi_star must have room for n+1 values
  void eval_all(cplx z, int n, cplx* phi, cplx* phi_star) const;
  std::pair<cplx, cplx> eval_phi(int n, cplx z) const;
  // phibar_n(z) = conj(phi_n(conj z)); note phibar_n(1/z) = phi*_n(z) z^{-n}
  cplx eval_phi_bar(int n, cplx z) const;

  // log T_{n-1} = -2 sum_{j<n} log chi_j
  double log_toeplitz_det(int n) const;

  // Christoffel-Darboux kernel sum_{j<N} phi_j(w) phibar_j(1/z), closed form
  // away from the diagonal, direct sum when |1 - w/z| < 1e-8
  cplx cd_kernel(int N, cplx z, cplx w) const;

  void write_csv(std::ostream& os, bool reproducible) const;

private:
  std::vector<cplx> verblunsky_;
  std::vector<double> chi_;
};

} // namespace loggas
