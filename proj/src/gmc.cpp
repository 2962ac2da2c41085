#include "loggas/gmc.hpp"

#include <cmath>
#include <stdexcept>

namespace loggas {

double FieldSample::eval(double theta) const {
  double x = 0.0;
  cplx step = std::polar(1.0, theta);
  cplx ph = 1.0;
  for (int j = 1; j <= L; ++j) {
    ph *= step;
    x += (Z[j - 1] * ph).real() / std::sqrt(static_cast<double>(j));
  }
  return x;
}

FieldSample sample_field(int L, KeyedRng& rng) {
  if (L < 1) throw std::invalid_argument("sample_field: need L >= 1");
  FieldSample fs;
  fs.L = L;
  fs.Z.resize(L);
  for (int j = 0; j < L; ++j) fs.Z[j] = rng.next_cgauss();
  return fs;
}

double harmonic_number(int L) {
  double h = 0.0;
  for (int j = 1; j <= L; ++j) h += 1.0 / j;
  return h;
}

double gmc_log_normalizer(int L, double beta) {
  return 0.25 * beta * beta * harmonic_number(L);
}

double gmc_density(const FieldSample& fs, double beta, double theta) {
  return std::exp(beta * fs.eval(theta) - gmc_log_normalizer(fs.L, beta));
}

double covariance_exact(int L, double dtheta) {
  double c = 0.0;
  for (int j = 1; j <= L; ++j) c += std::cos(j * dtheta) / (2.0 * j);
  return c;
}

bool gmc_subcritical(double beta) { return std::abs(beta) < 2.0; }

} // namespace loggas
