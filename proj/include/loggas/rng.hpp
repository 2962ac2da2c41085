#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace loggas {

// Counter-based generator keyed by (seed, stream).  Draws are a pure function
// of (seed, stream, counter), so independent streams can be handed to worker
// threads or to per-sample loops and the results do not depend on scheduling.
class KeyedRng {
public:
  KeyedRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ stream)), ctr_(0) {}

  std::uint64_t next_u64() { return mix(base_ ^ mix(ctr_++)); }

  // uniform on [0,1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0,1], safe as a log argument
  double next_double_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal pair via Box-Muller
  std::array<double, 2> next_gauss_pair() {
    double u1 = next_double_pos();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(6.283185307179586477 * u2),
            r * std::sin(6.283185307179586477 * u2)};
  }

  // standard complex gaussian, E|Z|^2 = 1
  std::complex<double> next_cgauss() {
    auto g = next_gauss_pair();
    return {g[0] * 0.7071067811865475244, g[1] * 0.7071067811865475244};
  }

private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t base_;
  std::uint64_t ctr_;
};

} // namespace loggas
