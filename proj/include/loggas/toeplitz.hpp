#pragma once

#include <iosfwd>
#include <vector>

#include "loggas/symbol.hpp"

namespace loggas {

// Fourier moments c_k of a symbol, either with respect to the uniform measure
// on the M-point lattice (discrete) or dtheta/2pi on the circle (continuum).
// Stores k = 0..max_order; negative k through conjugate symmetry, and for the
// discrete kind general k through exact mod-M periodicity.
class MomentTable {
public:
  enum class Kind { discrete, continuum };

  Kind kind() const { return kind_; }
  long lattice_size() const { return M_; }
  int max_order() const { return static_cast<int>(c_.size()) - 1; }

  cplx at(long k) const;

  // wrap an explicit coefficient list c_0..c_K (M ignored for continuum)
  static MomentTable from_coefficients(std::vector<cplx> c, Kind kind,
                                       long M = 0);
  // c_k = (1/M) sum_{l<M} f(2 pi l / M) e^{-2 pi i k l / M}
  static MomentTable discrete(const FHSymbol& f, long M, int max_order);
  // c_k = int_0^{2pi} f e^{-ik theta} dtheta/2pi, adaptive panels,
  // Gauss-Jacobi against each singular endpoint
  static MomentTable continuum(const FHSymbol& f, int max_order, double tol = 1e-12);

  void write_csv(std::ostream& os, bool reproducible) const;

private:
  Kind kind_ = Kind::continuum;
  long M_ = 0;
  std::vector<cplx> c_;
};

// det = phase * exp(log_abs), phase unimodular; log_abs = -inf marks an
// exactly singular matrix.
struct LogDet {
  double log_abs = 0.0;
  cplx phase = 1.0;
  bool positive_definite = false;

  bool singular() const;
  double value() const;
};

// log det of the N x N Toeplitz matrix (c_{j-k}); Cholesky when the matrix is
// numerically positive definite, pivoted LU otherwise
LogDet toeplitz_logdet(const MomentTable& moments, int N);

// E prod_j f(z_j) over the N-point discrete log-gas on the M lattice
LogDet expectation_product(const FHSymbol& f, int N, long M);

// log Z_{N,M} = log(N! M^N)
double partition_log(int N, long M);

} // namespace loggas
