#include "loggas/fredholm.hpp"

#include <cmath>
#include <stdexcept>

#include "loggas/quadrature.hpp"

namespace loggas {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// Oscillation content the arc rules must resolve.  The harmonics z^{-+pM}
// of v stay relevant until (1+eps)^{-pM} falls below double precision, so
// the ladder tops out near 37/log1p(eps) past the first rung at 2M; the cap
// at phase 74/eps covers symbols whose first rung is already negligible.
// The doubled-order pass keeps the error estimate honest either way.
double arc_frequency(long M, double eps) {
  double ladder = 2.0 * static_cast<double>(M) + 37.0 / std::log1p(eps);
  double cap = 74.0 / eps + 24.0;
  return std::min(ladder, cap);
}

void append_arc(Contour& c, int sector, double radius, double th_lo,
                double th_hi, long M, double eps, int order) {
  double span = th_hi - th_lo;
  int panels = std::max(
      2, static_cast<int>(std::ceil(span * arc_frequency(M, eps) / 38.4)));
  const QuadRule& rule = gauss_legendre(order);
  QuadPiece p;
  p.is_segment = false;
  p.sector = sector;
  for (int pa = 0; pa < panels; ++pa) {
    double a = th_lo + span * pa / panels;
    double h = span / panels;
    for (int i = 0; i < order; ++i) {
      double th = a + 0.5 * h * (1.0 + rule.x[i]);
      p.z.push_back(std::polar(radius, th));
      double w = rule.w[i] * 0.5 * h / kTwoPi;
      p.u.push_back(w);
      p.sw.push_back(w);
    }
  }
  c.pieces.push_back(std::move(p));
}

// Nodes and plain-dr weights on one segment half, distances t = |r-1| in
// (0, eps].  Innermost dyadic shell gets Gauss-Jacobi with the endpoint
// exponent, outer shells Gauss-Legendre; the shell ladder resolves the
// e^{-M|r-1|} layer of v at every M.
void half_segment_nodes(double eps, long M, double gamma, int order,
                        std::vector<double>& t, std::vector<double>& W) {
  int shells = std::max(2, static_cast<int>(std::ceil(std::log2(
                               std::max(2.0, eps * static_cast<double>(M))))) +
                               2);
  shells = std::min(shells, 40);
  double delta = eps * std::ldexp(1.0, -shells);
  const QuadRule& gj = gauss_jacobi(std::max(8, order / 2), 0.0, gamma);
  double scale = std::pow(0.5 * delta, gamma + 1.0);
  for (size_t i = 0; i < gj.x.size(); ++i) {
    double ti = 0.5 * delta * (1.0 + gj.x[i]);
    t.push_back(ti);
    W.push_back(scale * gj.w[i] / std::pow(ti, gamma));
  }
  const QuadRule& gl = gauss_legendre(std::max(8, order / 4));
  for (int s = shells; s >= 1; --s) {
    double lo = eps * std::ldexp(1.0, -s);
    double hi = 2.0 * lo;
    for (size_t i = 0; i < gl.x.size(); ++i) {
      t.push_back(lo + 0.5 * (hi - lo) * (1.0 + gl.x[i]));
      W.push_back(0.5 * (hi - lo) * gl.w[i]);
    }
  }
}

} // namespace

double default_epsilon(const FHSymbol& f) {
  const auto& sg = f.singularities();
  double eps = 0.25;
  for (size_t j = 0; j + 1 < sg.size() + (sg.size() > 1 ? 1 : 0); ++j) {
    double gap = (j + 1 < sg.size())
                     ? sg[j + 1].theta - sg[j].theta
                     : sg[0].theta + kTwoPi - sg.back().theta;
    double chord = 2.0 * std::sin(0.5 * gap);
    eps = std::min(eps, 0.25 * chord);
  }
  return eps;
}

Contour build_contour(const FHSymbol& f, long M, double epsilon,
                      const ContourResolution& res) {
  if (!(epsilon > 0.0) || epsilon > 0.4)
    throw std::invalid_argument("build_contour: need 0 < epsilon <= 0.4");
  Contour c;
  c.epsilon = epsilon;
  const auto& sg = f.singularities();

  if (sg.empty()) {
    double freq = arc_frequency(M, epsilon);
    int n = 64;
    while (n < 1.35 * freq) n *= 2;
    n *= std::max(1, res.arc_order / 24);
    for (int circle = 0; circle < 2; ++circle) {
      QuadPiece p;
      p.sector = 0;
      double radius = circle == 0 ? 1.0 + epsilon : 1.0 - epsilon;
      for (int l = 0; l < n; ++l) {
        p.z.push_back(std::polar(radius, kTwoPi * l / n));
        p.u.push_back(cplx(1.0 / n));
        p.sw.push_back(1.0 / n);
      }
      c.pieces.push_back(std::move(p));
    }
    return c;
  }

  size_t m = sg.size();
  for (size_t j = 0; j + 1 < m + (m > 1 ? 1 : 0); ++j) {
    double gap = (j + 1 < m) ? sg[j + 1].theta - sg[j].theta
                             : sg[0].theta + kTwoPi - sg.back().theta;
    if (epsilon >= 0.5 * std::sin(0.5 * gap))
      throw std::invalid_argument(
          "build_contour: epsilon too large for the singularity gaps");
  }

  // per-ray segment nodes, shared by the two adjacent sectors
  std::vector<std::vector<double>> seg_t(m), seg_W(m);
  for (size_t r = 0; r < m; ++r) {
    double gamma = sg[r].on_lattice(M) ? sg[r].beta - 1.0 : sg[r].beta;
    half_segment_nodes(epsilon, M, gamma, res.segment_order, seg_t[r], seg_W[r]);
  }

  // Each ray gets two passes with opposite signs, one per one-sided limit of
  // f, and the sign flips again across the circle: the outer halves carry
  // f_ccw - f_cw and the inner halves f_cw - f_ccw, which together with the
  // two counterclockwise circles reproduces the aliasing series of every
  // Laurent mode pushed off |z| = 1.
  auto emit_segment = [&](int sector, size_t r, bool ccw_side) {
    QuadPiece p;
    p.is_segment = true;
    p.sector = sector;
    p.ray = static_cast<int>(r);
    p.side = ccw_side ? RaySide::ccw : RaySide::cw;
    cplx w = sg[r].w();
    double orient = ccw_side ? 1.0 : -1.0;
    for (int half = 0; half < 2; ++half) {
      double hsgn = half == 0 ? -1.0 : 1.0;
      for (size_t i = 0; i < seg_t[r].size(); ++i) {
        double rr = half == 0 ? 1.0 - seg_t[r][i] : 1.0 + seg_t[r][i];
        p.z.push_back(rr * w);
        cplx uw = seg_W[r][i] * orient * hsgn / (cplx(0.0, kTwoPi) * rr);
        p.u.push_back(uw);
        p.sw.push_back(seg_W[r][i] / (kTwoPi * rr));
      }
    }
    c.pieces.push_back(std::move(p));
  };

  for (size_t j = 0; j < m; ++j) {
    double lo = sg[j].theta;
    double hi = (j + 1 < m) ? sg[j + 1].theta : sg[0].theta + kTwoPi;
    int sector = static_cast<int>(j);
    append_arc(c, sector, 1.0 + epsilon, lo, hi, M, epsilon, res.arc_order);
    emit_segment(sector, (j + 1) % m, false);
    append_arc(c, sector, 1.0 - epsilon, lo, hi, M, epsilon, res.arc_order);
    emit_segment(sector, j, true);
  }
  return c;
}

Eigen::MatrixXcd ab_matrix(const FHSymbol& f, const OPUCBasis& basis, int N,
                           long M, const Contour& contour) {
  if (basis.degree() < N - 1)
    throw std::invalid_argument("ab_matrix: basis degree too small");
  Eigen::MatrixXcd AB = Eigen::MatrixXcd::Zero(N, N);
  Eigen::VectorXcd b(N), phi(N);
  std::vector<cplx> p(N), q(N);
  for (const QuadPiece& piece : contour.pieces) {
    for (size_t i = 0; i < piece.z.size(); ++i) {
      cplx z = piece.z[i];
      cplx fv = f.eval_continued(z, piece.side);
      cplx vv = eval_v(M, z);
      cplx g = fv * vv * piece.u[i];
      if (g == cplx(0.0)) continue;
      basis.eval_all(z, N - 1, p.data(), q.data());
      cplx zi = 1.0 / z, zp = 1.0;
      double amax = 0.0;
      for (int k = 0; k < N; ++k) {
        phi(k) = p[k];
        b(k) = q[k] * zp;
        zp *= zi;
        amax = std::max(amax, std::abs(p[k]));
      }
      if (amax * std::abs(vv) > 1e280)
        throw std::overflow_error(
            "ab_matrix: basis values overflow on the contour; reduce epsilon");
      AB.noalias() += g * b * phi.transpose();
    }
  }
  return AB;
}

namespace {

// sum over node pairs of the sigma-weighted conjugated kernel magnitude;
// only magnitudes of v f enter, so no branch choices appear here
double hs_norm_sq(const FHSymbol& f, const OPUCBasis& basis, int N, long M,
                  const Contour& contour) {
  struct NodeData {
    cplx z, phiN, phisN, zmN;
    double A, B; // |z|^N |vf| sw and |vf| sw / |z|^N
    std::vector<cplx> phi_all, b_all;
  };
  std::vector<NodeData> nodes;
  std::vector<cplx> p(N + 1), q(N + 1);
  for (const QuadPiece& piece : contour.pieces) {
    for (size_t i = 0; i < piece.z.size(); ++i) {
      cplx z = piece.z[i];
      double avf = std::abs(f.eval_continued(z, piece.side)) *
                   std::abs(eval_v(M, z)) * piece.sw[i];
      if (avf == 0.0) continue;
      basis.eval_all(z, N, p.data(), q.data());
      NodeData nd;
      nd.z = z;
      nd.phiN = p[N];
      nd.phisN = q[N];
      nd.zmN = std::pow(z, -static_cast<double>(N));
      double mzN = std::pow(std::abs(z), N);
      nd.A = mzN * avf;
      nd.B = avf / mzN;
      nd.phi_all.assign(p.begin(), p.begin() + N);
      nd.b_all.resize(N);
      cplx zi = 1.0 / z, zp = 1.0;
      for (int k = 0; k < N; ++k) {
        nd.b_all[k] = q[k] * zp;
        zp *= zi;
      }
      nodes.push_back(std::move(nd));
    }
  }
  double hs2 = 0.0;
  for (const NodeData& a : nodes) {
    for (const NodeData& bb : nodes) {
      cplx ratio = bb.z / a.z;
      cplx kcd;
      if (std::abs(1.0 - ratio) < 1e-8) {
        kcd = 0.0;
        for (int k = 0; k < N; ++k) kcd += bb.phi_all[k] * a.b_all[k];
      } else {
        kcd = a.zmN * (a.phiN * bb.phisN - a.phisN * bb.phiN) / (1.0 - ratio);
      }
      hs2 += a.A * bb.B * std::norm(kcd);
    }
  }
  return hs2;
}

} // namespace

FredholmResult fredholm_det(const FHSymbol& f, const OPUCBasis& basis, int N,
                            long M, double epsilon,
                            const ContourResolution& res) {
  if (N < 1 || M < N)
    throw std::invalid_argument("fredholm_det: need 1 <= N <= M");
  if (basis.degree() < N)
    throw std::invalid_argument("fredholm_det: basis degree too small");
  double eps = epsilon > 0.0 ? epsilon : default_epsilon(f);

  ContourResolution fine{2 * res.arc_order, 2 * res.segment_order};
  Contour coarse_c = build_contour(f, M, eps, res);
  Contour fine_c = build_contour(f, M, eps, fine);

  cplx det_coarse =
      (Eigen::MatrixXcd::Identity(N, N) + ab_matrix(f, basis, N, M, coarse_c))
          .determinant();
  Eigen::MatrixXcd AB = ab_matrix(f, basis, N, M, fine_c);
  cplx det_fine = (Eigen::MatrixXcd::Identity(N, N) + AB).determinant();

  FredholmResult r;
  r.det = det_fine.real();
  r.det_imag = det_fine.imag();
  r.trace = AB.trace();
  r.hs_norm = std::sqrt(hs_norm_sq(f, basis, N, M, fine_c));
  r.resolution_error = std::abs(det_fine - det_coarse);
  r.epsilon = eps;
  return r;
}

} // namespace loggas
