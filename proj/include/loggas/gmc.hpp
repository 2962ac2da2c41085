#pragma once

#include <vector>

#include "loggas/rng.hpp"
#include "loggas/symbol.hpp"

namespace loggas {

// Truncated log-correlated field X_L(theta) = sum_{j<=L} Re(Z_j e^{ij theta})/sqrt(j)
// with iid standard complex gaussians Z_j.
struct FieldSample {
  int L = 0;
  std::vector<cplx> Z;

  double eval(double theta) const;
};

FieldSample sample_field(int L, KeyedRng& rng);

// H_L = sum_{j<=L} 1/j
double harmonic_number(int L);

// log E e^{beta X_L(theta)} = (beta^2/4) H_L
double gmc_log_normalizer(int L, double beta);

// density of the truncated GMC measure against dtheta/2pi:
// exp(beta X_L(theta)) / E exp(beta X_L)
double gmc_density(const FieldSample& fs, double beta, double theta);

// Cov(X_L(theta), X_L(theta')) = sum_{j<=L} cos(j (theta-theta'))/(2j)
double covariance_exact(int L, double dtheta);

// the L2 regime of the limiting measure; outside it the truncated density
// still makes sense but moments blow up
bool gmc_subcritical(double beta);

} // namespace loggas
