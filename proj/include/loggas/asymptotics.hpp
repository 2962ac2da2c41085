#pragma once

#include "loggas/symbol.hpp"

namespace loggas {

// log G(x) for the Barnes G function, x > 0
double log_barnes_g(double x);

// strong Szego exponent N Re(alpha_0) + (1/4) sum_{j>=1} j |alpha_j|^2
double szego_exponent(const FHSymbol& f, long N);

// additive pieces of the Fisher-Hartwig prediction for log T_{N-1}(f)
struct FHParts {
  double szego = 0.0;
  double singularity_potential = 0.0; // -sum_j (beta_j/2) V(w_j)
  double power = 0.0;                 // (sum_j beta_j^2/4) log N
  double interaction = 0.0;           // -sum_{p<q} (beta_p beta_q/2) log|w_p - w_q|
  double barnes = 0.0;                // sum_j [2 log G(1+beta_j/2) - log G(1+beta_j)]
  double total() const {
    return szego + singularity_potential + power + interaction + barnes;
  }
};

FHParts fh_prediction(const FHSymbol& f, long N);

// T_{N-1}(f) on the M lattice divided by the prediction e^{total}
double fh_ratio(const FHSymbol& f, int N, long M);

} // namespace loggas
