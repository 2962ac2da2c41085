#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "loggas/opuc.hpp"
#include "loggas/rng.hpp"

using namespace loggas;

namespace {
constexpr double kPi = 3.14159265358979323846;

MomentTable hat2_moments(int max_order) {
  std::vector<cplx> c = {2.0, -1.0};
  c.resize(max_order + 1, 0.0);
  return MomentTable::from_coefficients(std::move(c), MomentTable::Kind::continuum);
}
} // namespace

TEST_CASE("verblunsky coefficients of |z-1|^2") {
  OPUCBasis b = OPUCBasis::build(hat2_moments(21), 21);
  REQUIRE(b.degree() == 21);
  for (int k = 0; k < 21; ++k) {
    CHECK(std::abs(b.verblunsky()[k] - cplx(-1.0 / (k + 2))) < 1e-12);
  }
  for (int n = 1; n <= 22; ++n)
    CHECK(b.log_toeplitz_det(n) == doctest::Approx(std::log(n + 1.0)).epsilon(1e-12));
}

TEST_CASE("determinant through the recursion matches the matrix factorization") {
  FHSymbol f({cplx(0.0), cplx(1.0)}, {});
  MomentTable mom = MomentTable::continuum(f, 64);
  OPUCBasis b = OPUCBasis::build(mom, 64);
  for (int n = 1; n <= 64; ++n) {
    LogDet d = toeplitz_logdet(mom, n);
    CHECK(b.log_toeplitz_det(n) == doctest::Approx(d.log_abs).epsilon(1e-10));
  }
}

TEST_CASE("christoffel-darboux closed form against the direct sum") {
  FHSymbol f({cplx(0.1), cplx(0.3, -0.2)}, {});
  OPUCBasis b = OPUCBasis::build(MomentTable::continuum(f, 24), 24);
  const int N = 16;
  KeyedRng rng(2024, 0);
  std::vector<cplx> pz(N + 1), qz(N + 1), pw(N + 1), qw(N + 1);
  for (int trial = 0; trial < 100; ++trial) {
    cplx z = std::polar(0.8 + 0.45 * rng.next_double(), kPi * 2 * rng.next_double());
    cplx w = std::polar(0.8 + 0.45 * rng.next_double(), kPi * 2 * rng.next_double());
    if (std::abs(1.0 - w / z) < 1e-6) continue;
    b.eval_all(z, N, pz.data(), qz.data());
    b.eval_all(w, N, pw.data(), qw.data());
    cplx direct = 0.0, zp = 1.0, zi = 1.0 / z;
    double scale = 0.0;
    for (int j = 0; j < N; ++j) {
      direct += pw[j] * qz[j] * zp;
      scale += std::abs(pw[j] * qz[j] * zp);
      zp *= zi;
    }
    CHECK(std::abs(b.cd_kernel(N, z, w) - direct) < 1e-10 * std::max(1.0, scale));
  }
}

TEST_CASE("christoffel-darboux on the diagonal") {
  OPUCBasis b = OPUCBasis::build(hat2_moments(12), 12);
  const int N = 10;
  std::vector<cplx> p(N + 1), q(N + 1);
  for (double th : {0.3, 1.7, 4.0}) {
    cplx z = std::polar(1.0, th);
    b.eval_all(z, N, p.data(), q.data());
    double direct = 0.0;
    for (int j = 0; j < N; ++j) direct += std::norm(p[j]);
    cplx k = b.cd_kernel(N, z, z);
    CHECK(std::abs(k.imag()) < 1e-10 * direct);
    CHECK(k.real() == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("reflected polynomials through both evaluation paths") {
  FHSymbol f({cplx(0.1), cplx(0.3, -0.2)}, {});
  OPUCBasis b = OPUCBasis::build(MomentTable::continuum(f, 12), 12);
  for (cplx z : {std::polar(1.2, 0.7), std::polar(0.9, -1.9)}) {
    for (int n : {0, 3, 8}) {
      cplx lhs = b.eval_phi_bar(n, 1.0 / z);
      cplx rhs = b.eval_phi(n, z).second * std::pow(z, -static_cast<double>(n));
      CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("orthonormality on the lattice for a band-limited weight") {
  OPUCBasis b = OPUCBasis::build(hat2_moments(9), 9);
  const long Mq = 64;
  std::vector<cplx> p(10), q(10);
  std::vector<std::vector<cplx>> vals(Mq);
  for (long l = 0; l < Mq; ++l) {
    double th = 2 * kPi * l / Mq;
    b.eval_all(std::polar(1.0, th), 9, p.data(), q.data());
    vals[l].assign(p.begin(), p.end());
  }
  for (int j = 0; j <= 8; ++j)
    for (int k = 0; k <= 8; ++k) {
      cplx s = 0.0;
      for (long l = 0; l < Mq; ++l) {
        double th = 2 * kPi * l / Mq;
        s += vals[l][j] * std::conj(vals[l][k]) * (2.0 - 2.0 * std::cos(th));
      }
      s /= static_cast<double>(Mq);
      CHECK(std::abs(s - (j == k ? cplx(1.0) : cplx(0.0))) < 1e-12);
    }
}

TEST_CASE("levinson aborts on a moment matrix outside the cone") {
  MomentTable t = MomentTable::from_coefficients({cplx(1.0), cplx(1.2)},
                                                 MomentTable::Kind::continuum);
  CHECK_THROWS_AS(OPUCBasis::build(t, 1), std::runtime_error);
  CHECK_THROWS_AS(OPUCBasis::build(hat2_moments(3), -1), std::invalid_argument);
}

TEST_CASE("opuc csv layout") {
  OPUCBasis b = OPUCBasis::build(hat2_moments(2), 2);
  std::ostringstream os;
  b.write_csv(os, true);
  std::string s = os.str();
  CHECK(s.rfind("# schema=opuc/1\n", 0) == 0);
  CHECK(s.find("k,alpha_re,alpha_im,chi\n") != std::string::npos);
  CHECK(s.find("\n2,,,") != std::string::npos);
}
