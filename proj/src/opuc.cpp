#include "loggas/opuc.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "loggas/csvio.hpp"

namespace loggas {

// Levinson on the monic polynomials Phi_n:
//   Phi_{n+1} = z Phi_n - conj(alpha_n) Phi*_n
//   alpha_n   = conj( sum_k Phi_{n,k} c_{-(k+1)} ) / E_n,  E_n = ||Phi_n||^2
//   E_{n+1}   = (1 - |alpha_n|^2) E_n,   chi_n = E_n^{-1/2}
OPUCBasis OPUCBasis::build(const MomentTable& moments, int n) {
  if (n < 0) throw std::invalid_argument("OPUCBasis: negative degree");
  OPUCBasis b;
  b.verblunsky_.reserve(n);
  b.chi_.reserve(n + 1);

  double E = moments.at(0).real();
  if (!(E > 0.0))
    throw std::runtime_error("OPUCBasis: moment matrix not positive definite");
  b.chi_.push_back(1.0 / std::sqrt(E));

  std::vector<cplx> Phi{1.0};
  for (int k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (size_t j = 0; j < Phi.size(); ++j)
      s += Phi[j] * moments.at(-(static_cast<long>(j) + 1));
    cplx alpha = std::conj(s / E);
    double gap = 1.0 - std::norm(alpha);
    if (gap < 1e-13)
      throw std::runtime_error(
          "OPUCBasis: Verblunsky coefficient at the unit circle; moment "
          "matrix numerically singular at degree " + std::to_string(k));
    std::vector<cplx> next(Phi.size() + 1, 0.0);
    for (size_t j = 0; j < Phi.size(); ++j) next[j + 1] = Phi[j];
    for (size_t j = 0; j < Phi.size(); ++j)
      next[j] -= std::conj(alpha) * std::conj(Phi[Phi.size() - 1 - j]);
    Phi = std::move(next);
    E *= gap;
    b.verblunsky_.push_back(alpha);
    b.chi_.push_back(1.0 / std::sqrt(E));
  }
  return b;
}

void OPUCBasis::eval_all(cplx z, int n, cplx* phi, cplx* phi_star) const {
  if (n > degree()) throw std::invalid_argument("OPUCBasis: degree exceeded");
  cplx p = chi_[0], q = chi_[0];
  phi[0] = p;
  phi_star[0] = q;
  for (int k = 0; k < n; ++k) {
    double s = 1.0 / std::sqrt(1.0 - std::norm(verblunsky_[k]));
    cplx pn = s * (z * p - std::conj(verblunsky_[k]) * q);
    cplx qn = s * (q - verblunsky_[k] * z * p);
    p = pn;
    q = qn;
    phi[k + 1] = p;
    phi_star[k + 1] = q;
  }
}

std::pair<cplx, cplx> OPUCBasis::eval_phi(int n, cplx z) const {
  std::vector<cplx> p(n + 1), q(n + 1);
  eval_all(z, n, p.data(), q.data());
  return {p[n], q[n]};
}

cplx OPUCBasis::eval_phi_bar(int n, cplx z) const {
  return std::conj(eval_phi(n, std::conj(z)).first);
}

double OPUCBasis::log_toeplitz_det(int n) const {
  if (n > degree() + 1) throw std::invalid_argument("OPUCBasis: degree exceeded");
  double s = 0.0;
  for (int j = 0; j < n; ++j) s -= 2.0 * std::log(chi_[j]);
  return s;
}

cplx OPUCBasis::cd_kernel(int N, cplx z, cplx w) const {
  if (N > degree()) throw std::invalid_argument("OPUCBasis: degree exceeded");
  std::vector<cplx> pz(N + 1), qz(N + 1), pw(N + 1), qw(N + 1);
  eval_all(z, N, pz.data(), qz.data());
  eval_all(w, N, pw.data(), qw.data());
  cplx ratio = w / z;
  if (std::abs(1.0 - ratio) < 1e-8) {
    // sum_{j<N} phi_j(w) phibar_j(1/z), with phibar_j(1/z) = phi*_j(z) z^{-j}
    cplx s = 0.0, zp = 1.0, zi = 1.0 / z;
    for (int j = 0; j < N; ++j) {
      s += pw[j] * qz[j] * zp;
      zp *= zi;
    }
    return s;
  }
  cplx zmN = std::pow(z, -static_cast<double>(N));
  return zmN * (pz[N] * qw[N] - qz[N] * pw[N]) / (1.0 - ratio);
}

void OPUCBasis::write_csv(std::ostream& os, bool reproducible) const {
  csv_header(os, "opuc", {"k", "alpha_re", "alpha_im", "chi"}, reproducible);
  for (int k = 0; k <= degree(); ++k) {
    if (k < degree()) {
      os << k << ',' << fmt_g17(verblunsky_[k].real()) << ','
         << fmt_g17(verblunsky_[k].imag()) << ',' << fmt_g17(chi_[k]) << '\n';
    } else {
      os << k << ",,," << fmt_g17(chi_[k]) << '\n';
    }
  }
}

} // namespace loggas
