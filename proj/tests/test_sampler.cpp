#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "loggas/asymptotics.hpp"
#include "loggas/sampler.hpp"
#include "loggas/stats.hpp"
#include "loggas/toeplitz.hpp"

using namespace loggas;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("saturated gas fills the lattice") {
  KeyedRng rng(7, 0);
  for (int i = 0; i < 20; ++i) {
    GasSample s = sample_gas(2, 2, rng);
    REQUIRE(s.sites.size() == 2);
    CHECK(s.sites[0] == 0);
    CHECK(s.sites[1] == 1);
  }
  CHECK_THROWS_AS(sample_gas(3, 2, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_gas(0, 2, rng), std::invalid_argument);
}

TEST_CASE("single particle is uniform") {
  KeyedRng rng(11, 0);
  const int n = 100000;
  const long M = 7;
  std::vector<long> count(M, 0);
  for (int i = 0; i < n; ++i) ++count[sample_gas(1, M, rng).sites[0]];
  double p = 1.0 / M, sigma = std::sqrt(n * p * (1 - p));
  for (long x = 0; x < M; ++x)
    CHECK(std::abs(count[x] - n * p) < 4.0 * sigma);
}

TEST_CASE("brute force pmf for the 2 in 4 gas") {
  auto supports = enumerate_supports(2, 4);
  auto pmf = brute_force_pmf(2, 4);
  REQUIRE(supports.size() == 6);
  REQUIRE(pmf.size() == 6);
  double total = 0.0, tv = 0.0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    total += pmf[i];
    tv += 0.5 * std::abs(pmf[i] - support_probability(2, 4, supports[i]));
    bool antipodal = (supports[i][1] - supports[i][0]) == 2;
    CHECK(pmf[i] == doctest::Approx(antipodal ? 0.25 : 0.125).epsilon(1e-12));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tv < 1e-12);
}

TEST_CASE("sampler frequencies match the pmf") {
  auto supports = enumerate_supports(2, 4);
  auto pmf = brute_force_pmf(2, 4);
  std::map<std::vector<int>, long> count;
  KeyedRng rng(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++count[sample_gas(2, 4, rng).sites];
  double chi2 = 0.0;
  for (size_t i = 0; i < supports.size(); ++i) {
    double expect = n * pmf[i];
    double diff = count[supports[i]] - expect;
    chi2 += diff * diff / expect;
  }
  CHECK(chi2_sf(chi2, 5.0) > 0.001);
}

TEST_CASE("inclusion probabilities are N over M") {
  KeyedRng rng(13, 1);
  const int n = 100000, N = 4;
  const long M = 16;
  std::vector<long> count(M, 0);
  for (int i = 0; i < n; ++i)
    for (int x : sample_gas(N, M, rng).sites) ++count[x];
  double p = static_cast<double>(N) / M, sigma = std::sqrt(n * p * (1 - p));
  for (long x = 0; x < M; ++x)
    CHECK(std::abs(count[x] - n * p) < 4.0 * sigma);
}

TEST_CASE("draws are a function of the rng key") {
  KeyedRng a(99, 3), b(99, 3), c(99, 4);
  bool differ = false;
  for (int i = 0; i < 20; ++i) {
    GasSample sa = sample_gas(3, 9, a), sb = sample_gas(3, 9, b),
              sc = sample_gas(3, 9, c);
    CHECK(sa.sites == sb.sites);
    differ = differ || sa.sites != sc.sites;
  }
  CHECK(differ);
}

TEST_CASE("power sums of the full gas") {
  KeyedRng rng(1, 0);
  GasSample s = sample_gas(8, 8, rng);
  auto Z = power_sums(s, 8, 8);
  REQUIRE(Z.size() == 8);
  for (int j = 1; j < 8; ++j) CHECK(std::abs(Z[j - 1]) < 1e-12);
  CHECK(std::abs(Z[7] - cplx(8.0)) < 1e-12);
}

TEST_CASE("characteristic polynomial of the full gas") {
  KeyedRng rng(1, 0);
  const long M = 8;
  GasSample s = sample_gas(8, M, rng);
  // prod (x - z_p) = x^M - 1 on the circle
  double lcp = log_char_poly(s, M, kPi / M, 1.5);
  CHECK(lcp == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
  double l1 = log_char_poly(s, M, 0.9, 1.0);
  double l2 = log_char_poly(s, M, 0.9, 2.0);
  CHECK(l2 == doctest::Approx(2.0 * l1).epsilon(1e-12));
  CHECK(std::isinf(log_char_poly(s, M, 0.0, 1.0)));
  CHECK(log_char_poly(s, M, 0.0, 1.0) < 0.0);
}

TEST_CASE("truncated field statistic") {
  KeyedRng rng(1, 0);
  GasSample full = sample_gas(8, 8, rng);
  CHECK(std::abs(log_truncated_field(full, 8, 0.3, 1.0, 3)) < 1e-12);
  GasSample one{{0}};
  CHECK(log_truncated_field(one, 4, 0.0, 1.0, 1) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  // finite even on an occupied site
  CHECK(std::isfinite(log_truncated_field(one, 4, 0.0, 2.0, 6)));
}

TEST_CASE("linear statistics") {
  GasSample s{{0, 2}};
  double v = linear_statistic(s, 4, [](double th) { return std::cos(th); });
  CHECK(v == doctest::Approx(1.0 + std::cos(kPi)).epsilon(1e-14));
}

TEST_CASE("empirical measure of the flat function") {
  const int N = 4;
  const long M = 16;
  KeyedRng rng(21, 0);
  std::vector<GasSample> samples;
  samples.reserve(10000);
  for (int i = 0; i < 10000; ++i) samples.push_back(sample_gas(N, M, rng));
  std::vector<double> grid;
  for (int l = 0; l < 6; ++l) grid.push_back(2 * kPi * (l + 0.37) / 6);
  auto est = empirical_measure_integral(samples, M, N, 1.0, 0,
                                        grid, [](double) { return 1.0; });
  CHECK(est.n == 10000);
  CHECK(est.stderr_ > 0.0);
  CHECK(std::abs(est.mean - 1.0) < 3.0 * est.stderr_);
  CHECK(est.stderr_ < 0.05);
}

TEST_CASE("monte carlo moment against the exact expectation") {
  const int N = 4;
  const long M = 16;
  const double beta = 1.0, theta = 0.7;
  KeyedRng rng(23, 0);
  std::vector<double> xs;
  xs.reserve(10000);
  for (int i = 0; i < 10000; ++i) {
    GasSample s = sample_gas(N, M, rng);
    xs.push_back(std::exp(log_char_poly(s, M, theta, beta)));
  }
  Moments m = sample_moments(xs);
  FHSymbol f({}, {Singularity::at_angle(theta, beta)});
  double target = expectation_product(f, N, M).value();
  CHECK(std::abs(m.mean - target) < 4.0 * m.stderr_mean());
}
