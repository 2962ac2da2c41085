#include "loggas/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "loggas/toeplitz.hpp"

namespace loggas {

// Asymptotic series for log G(z+1), z large:
//   z^2/2 log z - 3z^2/4 + z/2 log 2pi - log z / 12 + zeta'(-1)
//     + sum_k B_{2k+2} / (4k(k+1) z^{2k})
// pushed into range with G(x+1) = Gamma(x) G(x).
double log_barnes_g(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_barnes_g: need x > 0");
  constexpr double kZetaPrimeM1 = -0.16542114370045092921;
  constexpr double kLog2Pi = 1.8378770664093454836;
  // B_4, B_6, ..., B_16 over 4k(k+1)
  constexpr double tail[] = {
      -1.0 / 240.0,       1.0 / 1008.0,      -1.0 / 1440.0,
      1.0 / 1056.0,       -691.0 / 327600.0, 1.0 / 144.0,
      -3617.0 / 114240.0};
  double shift = 0.0;
  while (x < 12.0) {
    shift -= std::lgamma(x);
    x += 1.0;
  }
  double z = x - 1.0;
  double lz = std::log(z);
  double s = 0.5 * z * z * lz - 0.75 * z * z + 0.5 * z * kLog2Pi - lz / 12.0 +
             kZetaPrimeM1;
  double z2 = z * z, p = z2;
  for (double t : tail) {
    s += t / p;
    p *= z2;
  }
  return s + shift;
}

double szego_exponent(const FHSymbol& f, long N) {
  const auto& a = f.alpha();
  double s = a.empty() ? 0.0 : N * a[0].real();
  for (size_t j = 1; j < a.size(); ++j) s += 0.25 * j * std::norm(a[j]);
  return s;
}

FHParts fh_prediction(const FHSymbol& f, long N) {
  if (N < 1) throw std::invalid_argument("fh_prediction: need N >= 1");
  FHParts parts;
  parts.szego = szego_exponent(f, N);
  const auto& sg = f.singularities();
  double b2 = 0.0;
  for (const Singularity& s : sg) {
    parts.singularity_potential -= 0.5 * s.beta * f.V(s.theta);
    b2 += s.beta * s.beta;
    parts.barnes +=
        2.0 * log_barnes_g(1.0 + 0.5 * s.beta) - log_barnes_g(1.0 + s.beta);
  }
  parts.power = 0.25 * b2 * std::log(static_cast<double>(N));
  for (size_t p = 0; p < sg.size(); ++p)
    for (size_t q = p + 1; q < sg.size(); ++q)
      parts.interaction -= 0.5 * sg[p].beta * sg[q].beta *
                           std::log(std::abs(sg[p].w() - sg[q].w()));
  return parts;
}

double fh_ratio(const FHSymbol& f, int N, long M) {
  LogDet t = expectation_product(f, N, M);
  if (t.singular()) return 0.0;
  return t.phase.real() * std::exp(t.log_abs - fh_prediction(f, N).total());
}

} // namespace loggas
