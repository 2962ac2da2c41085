#pragma once

#include <functional>
#include <vector>

#include "loggas/rng.hpp"
#include "loggas/symbol.hpp"

namespace loggas {

// One configuration of the N-point discrete log-gas on the M-point lattice,
// as sorted site indices p with z = e^{2 pi i p / M}.
struct GasSample {
  std::vector<int> sites;
};

// Exact sampler for the projection determinantal process with kernel
// K(p,q) = (1/M) sum_{k<N} e^{2 pi i k (p-q)/M}: sequential conditionals,
// Gram-Schmidt residuals, O(N^2 M) per sample.
GasSample sample_gas(int N, long M, KeyedRng& rng);

// P(support = S) = det K_S for the projection kernel
double support_probability(int N, long M, const std::vector<int>& support);

// probabilities of all C(M,N) supports in lexicographic order, from the
// squared Vandermonde weight; exact up to floating point
std::vector<double> brute_force_pmf(int N, int M);
// the support list matching brute_force_pmf order
std::vector<std::vector<int>> enumerate_supports(int N, int M);

double linear_statistic(const GasSample& s, long M,
                        const std::function<double(double)>& g);

// beta sum_j log|e^{i theta} - z_j|; -inf when theta hits an occupied site
double log_char_poly(const GasSample& s, long M, double theta, double beta);

// power sums Z_j = sum z^j for j = 1..L
std::vector<cplx> power_sums(const GasSample& s, long M, int L);

// -beta sum_{j<=L} Re(e^{-i j theta} Z_j)/j, the truncated-field statistic;
// always finite
double log_truncated_field(const GasSample& s, long M, double theta,
                           double beta, int L);

struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n = 0;
};

// Monte Carlo of int g dmu over the normalized exponential measure:
// per sample, mean over the theta grid of g(theta) X(theta) / E X(theta)
// with X = |char poly|^beta (L == 0) or the L-truncated field, and E X the
// exact lattice expectation via Toeplitz determinants.
MonteCarloEstimate empirical_measure_integral(
    const std::vector<GasSample>& samples, long M, int N, double beta, int L,
    const std::vector<double>& theta_grid,
    const std::function<double(double)>& g);

} // namespace loggas
