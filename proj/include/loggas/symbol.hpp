#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace loggas {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Which side of a cut ray a limit is taken from, looking along the ray from
// the origin: ccw means the limit from angles theta > theta_j, cw from below.
enum class RaySide { ccw, cw };

struct Singularity {
  double theta = 0.0; // angle in [0, 2pi)
  double beta = 0.0;  // strength, 0 < beta <= 8
  // theta = pi * num / den when den > 0 (reduced, num in [0, 2 den)).
  // den == 0 marks an angle with no exact representation; such a point is
  // never treated as a lattice point.
  long num = 0;
  long den = 0;

  cplx w() const { return std::polar(1.0, theta); }
  bool is_exact() const { return den > 0; }
  // whether w^M = 1
  bool on_lattice(long M) const {
    if (den <= 0) return false;
    long m = 2 * den;
    return ((M % m) * (num % m)) % m == 0;
  }
  static Singularity at_pi_rational(long num, long den, double beta);
  static Singularity at_angle(double theta, double beta);
};

// Symbol f(z) = e^{V(z)} prod_j |z - w_j|^{beta_j} on the unit circle, with
//   V(z) = sum_{j=0}^{K} (alpha_j z^j + conj(alpha_j) z^{-j}) / 2.
// Laurent coefficients: a_0 = Re alpha_0, a_j = alpha_j/2,
// a_{-j} = conj(alpha_j)/2.
class FHSymbol {
public:
  FHSymbol() = default;
  // alpha = [alpha_0, ..., alpha_K]; singularity angles must be distinct.
  // Entries with beta == 0 are dropped; the list is sorted by angle.
  FHSymbol(std::vector<cplx> alpha, std::vector<Singularity> sing);

  const std::vector<cplx>& alpha() const { return alpha_; }
  const std::vector<Singularity>& singularities() const { return sing_; }
  int bandwidth() const { return static_cast<int>(alpha_.size()) - 1; }
  bool smooth() const { return sing_.empty(); }

  // V restricted to the circle (real valued)
  double V(double theta) const;
  // Laurent polynomial sum a_j z^j at a general nonzero point
  cplx V_laurent(cplx z) const;

  // f on the unit circle; exactly zero at singular angles
  double eval_on_circle(double theta) const;

  // interior factor D_i, analytic off the cuts w_j [1, inf)
  cplx eval_Di(cplx z) const;
  // exterior factor D_e, analytic off the cuts w_j (0, 1], z != 0
  cplx eval_De(cplx z) const;

  // Analytic continuation f = D_i / D_e off the cut rays w_j (0, inf).
  // On a ray the stated one-sided limit is returned; the jump across ray j
  // is the phase e^{-i pi beta_j sign} with sign +1 crossing ccw -> cw.
  cplx eval_continued(cplx z, RaySide side) const;

  // index of the ray containing z (within relative tolerance), or -1
  int on_ray(cplx z, double tol = 1e-12) const;

  std::string to_json() const;
  static FHSymbol from_json(const std::string& text);

private:
  std::vector<cplx> alpha_;
  std::vector<Singularity> sing_;
};

// v(z) = z^M/(1-z^M) for |z|<1,  z^{-M}/(1-z^{-M}) for |z|>1.
// Poles exactly at the M-th roots of unity; |z| = 1 is not allowed.
cplx eval_v(long M, cplx z);

} // namespace loggas
