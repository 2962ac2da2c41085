#pragma once

#include <Eigen/Dense>
#include <vector>

#include "loggas/opuc.hpp"
#include "loggas/symbol.hpp"

namespace loggas {

struct ContourResolution {
  int arc_order = 24;     // Gauss-Legendre order per arc panel
  int segment_order = 64; // node budget per segment half
};

// One quadrature piece of the contour: nodes z, complex weights u with
// sum u_i g(z_i) ~ int g dz/(2 pi i z) along the piece orientation, and the
// positive sigma weights sw (dtheta/2pi on arcs, dr/2pi r on segments).
struct QuadPiece {
  bool is_segment = false;
  int sector = 0;
  int ray = -1;                // singularity index, segments only
  RaySide side = RaySide::ccw; // one-sided limit of f to use on this piece
  std::vector<cplx> z;
  std::vector<cplx> u;
  std::vector<double> sw;
};

struct Contour {
  double epsilon = 0.0;
  std::vector<QuadPiece> pieces;
  size_t total_nodes() const {
    size_t n = 0;
    for (const auto& p : pieces) n += p.z.size();
    return n;
  }
};

// min(1/4, smallest adjacent chord / 4)
double default_epsilon(const FHSymbol& f);

// Deformation system of the aliasing correction: the circles at radii
// 1 +- epsilon, both counterclockwise, plus two oppositely signed passes
// along every singular ray, one per side tag, with the sign flipping again
// where the pass crosses |z| = 1.  Summing u_i z_i^{-k} f(z_i) v(z_i) over
// all nodes then reproduces the discrete-minus-continuum moment c_k.
// Without singularities the contour degenerates to the two full circles.
Contour build_contour(const FHSymbol& f, long M, double epsilon,
                      const ContourResolution& res = {});

// (AB)_{l,k} = int_Gamma phibar_l(1/z) phi_k(z) v(z) f(z) dz/(2 pi i z),
// l,k = 0..N-1; det(I+K) = det(I_N + AB)
Eigen::MatrixXcd ab_matrix(const FHSymbol& f, const OPUCBasis& basis, int N,
                           long M, const Contour& contour);

struct FredholmResult {
  double det = 1.0;
  double det_imag = 0.0; // drift of Im det(I+AB) away from 0, diagnostic
  cplx trace = 0.0;
  double hs_norm = 0.0;
  double resolution_error = 0.0;
  double epsilon = 0.0;
};

// det(I+K) with trace and Hilbert-Schmidt diagnostics; quadrature orders are
// doubled once and the determinant difference reported as resolution_error.
// epsilon <= 0 selects the default.
FredholmResult fredholm_det(const FHSymbol& f, const OPUCBasis& basis, int N,
                            long M, double epsilon = 0.0,
                            const ContourResolution& res = {});

} // namespace loggas
