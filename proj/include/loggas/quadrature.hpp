#pragma once

#include <vector>

namespace loggas {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Nodes and weights for  int_{-1}^{1} (1-x)^a (1+x)^b g(x) dx,  a,b > -1.
// Golub-Welsch on the Jacobi three-term recurrence.  Rules are cached.
const QuadRule& gauss_jacobi(int n, double a, double b);

inline const QuadRule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

} // namespace loggas
