#include "loggas/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "loggas/toeplitz.hpp"

namespace loggas {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

// projection kernel, Dirichlet form; d = p - q
cplx kernel_K(int N, long M, long d) {
  d %= M;
  if (d == 0) return cplx(static_cast<double>(N) / M, 0.0);
  double x = kPi * static_cast<double>(d) / M;
  double mag = std::sin(N * x) / (M * std::sin(x));
  return std::polar(mag, (N - 1.0) * x);
}
} // namespace

GasSample sample_gas(int N, long M, KeyedRng& rng) {
  if (N < 1 || M < N) throw std::invalid_argument("sample_gas: need 1 <= N <= M");
  std::vector<double> r(M, static_cast<double>(N) / M);
  std::vector<std::vector<cplx>> e;
  e.reserve(N);
  GasSample out;
  out.sites.reserve(N);

  for (int t = 0; t < N; ++t) {
    double total = static_cast<double>(N - t);
    double u = rng.next_double() * total;
    long xt = M - 1;
    double acc = 0.0;
    for (long x = 0; x < M; ++x) {
      acc += r[x];
      if (acc >= u) { xt = x; break; }
    }
    std::vector<cplx> col(M);
    for (long x = 0; x < M; ++x) col[x] = kernel_K(N, M, x - xt);
    for (const auto& ei : e) {
      cplx c = std::conj(ei[xt]);
      for (long x = 0; x < M; ++x) col[x] -= ei[x] * c;
    }
    double piv = r[xt];
    if (!(piv > 0.0))
      throw std::runtime_error("sample_gas: nonpositive residual pivot");
    double inv = 1.0 / std::sqrt(piv);
    for (long x = 0; x < M; ++x) col[x] *= inv;
    for (long x = 0; x < M; ++x) {
      r[x] -= std::norm(col[x]);
      if (r[x] < 0.0) r[x] = 0.0;
    }
    r[xt] = 0.0;
    e.push_back(std::move(col));
    out.sites.push_back(static_cast<int>(xt));
  }
  std::sort(out.sites.begin(), out.sites.end());
  return out;
}

double support_probability(int N, long M, const std::vector<int>& support) {
  if (static_cast<int>(support.size()) != N)
    throw std::invalid_argument("support_probability: support size must be N");
  Eigen::MatrixXcd K(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      K(i, j) = kernel_K(N, M, support[i] - support[j]);
  return K.determinant().real();
}

std::vector<std::vector<int>> enumerate_supports(int N, int M) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(N);
  for (int i = 0; i < N; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = N - 1;
    while (i >= 0 && c[i] == M - N + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < N; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

std::vector<double> brute_force_pmf(int N, int M) {
  auto supports = enumerate_supports(N, M);
  std::vector<double> pmf;
  pmf.reserve(supports.size());
  double logMN = N * std::log(static_cast<double>(M));
  for (const auto& s : supports) {
    double lw = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        double d = 2.0 * std::sin(kPi * (s[j] - s[i]) / M);
        lw += 2.0 * std::log(std::abs(d));
      }
    pmf.push_back(std::exp(lw - logMN));
  }
  return pmf;
}

double linear_statistic(const GasSample& s, long M,
                        const std::function<double(double)>& g) {
  double v = 0.0;
  for (int p : s.sites) v += g(kTwoPi * p / M);
  return v;
}

double log_char_poly(const GasSample& s, long M, double theta, double beta) {
  double v = 0.0;
  for (int p : s.sites) {
    double base = 2.0 * std::abs(std::sin(0.5 * (theta - kTwoPi * p / M)));
    if (base == 0.0) return -std::numeric_limits<double>::infinity();
    v += beta * std::log(base);
  }
  return v;
}

std::vector<cplx> power_sums(const GasSample& s, long M, int L) {
  std::vector<cplx> Z(L, 0.0);
  for (int p : s.sites) {
    cplx zeta = std::polar(1.0, kTwoPi * p / M);
    cplx zp = 1.0;
    for (int j = 0; j < L; ++j) {
      zp *= zeta;
      Z[j] += zp;
    }
  }
  return Z;
}

double log_truncated_field(const GasSample& s, long M, double theta,
                           double beta, int L) {
  std::vector<cplx> Z = power_sums(s, M, L);
  double v = 0.0;
  for (int j = 1; j <= L; ++j)
    v -= beta * (std::polar(1.0, -j * theta) * Z[j - 1]).real() / j;
  return v;
}

MonteCarloEstimate empirical_measure_integral(
    const std::vector<GasSample>& samples, long M, int N, double beta, int L,
    const std::vector<double>& theta_grid,
    const std::function<double(double)>& g) {
  if (theta_grid.empty())
    throw std::invalid_argument("empirical_measure_integral: empty grid");
  size_t G = theta_grid.size();
  std::vector<double> log_norm(G), gval(G);
  for (size_t i = 0; i < G; ++i) {
    FHSymbol sym;
    if (L == 0) {
      sym = FHSymbol({}, {Singularity::at_angle(theta_grid[i], beta)});
    } else {
      std::vector<cplx> alpha(L + 1, 0.0);
      for (int j = 1; j <= L; ++j)
        alpha[j] = -(beta / j) * std::polar(1.0, -j * theta_grid[i]);
      sym = FHSymbol(std::move(alpha), {});
    }
    LogDet d = expectation_product(sym, N, M);
    if (d.singular())
      throw std::runtime_error(
          "empirical_measure_integral: degenerate normalizer on the grid");
    log_norm[i] = d.log_abs;
    gval[i] = g(theta_grid[i]);
  }
  double s1 = 0.0, s2 = 0.0;
  for (const GasSample& s : samples) {
    double acc = 0.0;
    for (size_t i = 0; i < G; ++i) {
      double lx = (L == 0) ? log_char_poly(s, M, theta_grid[i], beta)
                           : log_truncated_field(s, M, theta_grid[i], beta, L);
      if (lx == -std::numeric_limits<double>::infinity()) continue;
      acc += gval[i] * std::exp(lx - log_norm[i]);
    }
    acc /= static_cast<double>(G);
    s1 += acc;
    s2 += acc * acc;
  }
  MonteCarloEstimate est;
  est.n = static_cast<long>(samples.size());
  if (est.n > 0) {
    est.mean = s1 / est.n;
    if (est.n > 1) {
      double var = (s2 - s1 * s1 / est.n) / (est.n - 1);
      est.stderr_ = std::sqrt(std::max(0.0, var) / est.n);
    }
  }
  return est;
}

} // namespace loggas
