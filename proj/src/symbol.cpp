#include "loggas/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace loggas {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;

long gcd_pos(long a, long b) { return std::gcd(std::abs(a), std::abs(b)); }
} // namespace

Singularity Singularity::at_pi_rational(long num, long den, double beta) {
  if (den == 0) throw std::invalid_argument("singularity: zero denominator");
  if (den < 0) { den = -den; num = -num; }
  long g = gcd_pos(num, den);
  if (g > 1) { num /= g; den /= g; }
  num %= 2 * den;
  if (num < 0) num += 2 * den;
  Singularity s;
  s.num = num;
  s.den = den;
  s.theta = kPi * static_cast<double>(num) / static_cast<double>(den);
  s.beta = beta;
  return s;
}

Singularity Singularity::at_angle(double theta, double beta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0) theta += kTwoPi;
  // a double that is a clean rational multiple of pi means the same ray as its
  // pi*p/q spelling, and lattice membership must not depend on which spelling
  // the caller used
  for (long q = 1; q <= 64; ++q) {
    double p = std::round(theta * static_cast<double>(q) / kPi);
    if (std::abs(theta - kPi * p / static_cast<double>(q)) <= 1e-12)
      return at_pi_rational(static_cast<long>(p), q, beta);
  }
  Singularity s;
  s.theta = theta;
  s.beta = beta;
  return s;
}

FHSymbol::FHSymbol(std::vector<cplx> alpha, std::vector<Singularity> sing)
    : alpha_(std::move(alpha)), sing_(std::move(sing)) {
  for (const cplx& a : alpha_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw std::invalid_argument("symbol: non-finite alpha coefficient");
  std::vector<Singularity> kept;
  for (const Singularity& s : sing_) {
    if (s.beta == 0.0) continue;
    if (!(s.beta > 0.0) || s.beta > 8.0)
      throw std::invalid_argument("symbol: beta must lie in (0, 8]");
    kept.push_back(s);
  }
  sing_ = std::move(kept);
  std::sort(sing_.begin(), sing_.end(),
            [](const Singularity& a, const Singularity& b) { return a.theta < b.theta; });
  for (size_t j = 1; j < sing_.size(); ++j)
    if (sing_[j].theta - sing_[j - 1].theta < 1e-14)
      throw std::invalid_argument("symbol: coincident singularity angles");
  if (!sing_.empty() && sing_.front().theta + kTwoPi - sing_.back().theta < 1e-14)
    throw std::invalid_argument("symbol: coincident singularity angles");
}

double FHSymbol::V(double theta) const {
  if (alpha_.empty()) return 0.0;
  double v = alpha_[0].real();
  cplx ph = std::polar(1.0, theta);
  cplx p = 1.0;
  for (size_t j = 1; j < alpha_.size(); ++j) {
    p *= ph;
    v += (alpha_[j] * p).real();
  }
  return v;
}

cplx FHSymbol::V_laurent(cplx z) const {
  if (alpha_.empty()) return 0.0;
  cplx v = alpha_[0].real();
  cplx zp = 1.0, zm = 1.0, zi = 1.0 / z;
  for (size_t j = 1; j < alpha_.size(); ++j) {
    zp *= z;
    zm *= zi;
    v += 0.5 * (alpha_[j] * zp + std::conj(alpha_[j]) * zm);
  }
  return v;
}

double FHSymbol::eval_on_circle(double theta) const {
  double val = std::exp(V(theta));
  for (const Singularity& s : sing_) {
    double base = 2.0 * std::abs(std::sin(0.5 * (theta - s.theta)));
    val *= std::pow(base, s.beta);
  }
  return val;
}

int FHSymbol::on_ray(cplx z, double tol) const {
  double r = std::abs(z);
  if (r == 0.0) return -1;
  for (size_t l = 0; l < sing_.size(); ++l) {
    cplx u = z * std::conj(sing_[l].w());
    if (u.real() > 0.0 && std::abs(u.imag()) <= tol * r)
      return static_cast<int>(l);
  }
  return -1;
}

cplx FHSymbol::eval_Di(cplx z) const {
  cplx expo = alpha_.empty() ? cplx(0.0) : cplx(0.5 * alpha_[0].real());
  cplx zp = 1.0;
  for (size_t j = 1; j < alpha_.size(); ++j) {
    zp *= z;
    expo += 0.5 * alpha_[j] * zp;
  }
  for (const Singularity& s : sing_) {
    cplx u = z * std::conj(s.w());
    if (u.real() >= 1.0 - 1e-12 && std::abs(u.imag()) <= 1e-12 * std::abs(u))
      throw std::domain_error("eval_Di: z on a cut ray");
    expo += 0.5 * s.beta * std::log(1.0 - u);
  }
  return std::exp(expo);
}

cplx FHSymbol::eval_De(cplx z) const {
  if (z == 0.0) throw std::domain_error("eval_De: z = 0");
  cplx expo = alpha_.empty() ? cplx(0.0) : cplx(-0.5 * alpha_[0].real());
  cplx zm = 1.0, zi = 1.0 / z;
  for (size_t j = 1; j < alpha_.size(); ++j) {
    zm *= zi;
    expo -= 0.5 * std::conj(alpha_[j]) * zm;
  }
  for (const Singularity& s : sing_) {
    cplx u = s.w() * zi;
    if (u.real() >= 1.0 - 1e-12 && std::abs(u.imag()) <= 1e-12 * std::abs(u))
      throw std::domain_error("eval_De: z on a cut segment");
    expo -= 0.5 * s.beta * std::log(1.0 - u);
  }
  return std::exp(expo);
}

// One-sided ray limits of the two principal logs.  With z = r w_l, r > 1:
//   Log(1 - z/w_l) -> log(r-1) - i pi   from the ccw side,
//                     log(r-1) + i pi   from the cw side,
// and for r < 1:
//   Log(1 - w_l/z) -> log(1/r - 1) + i pi   (ccw),
//                     log(1/r - 1) - i pi   (cw).
// Everything else stays on the principal branch.
cplx FHSymbol::eval_continued(cplx z, RaySide side) const {
  double r = std::abs(z);
  if (r == 0.0) throw std::domain_error("eval_continued: z = 0");
  int ray = on_ray(z);
  if (ray >= 0 && std::abs(r - 1.0) < 1e-14)
    throw std::domain_error("eval_continued: z at a singular point");
  cplx expo = V_laurent(z);
  double sgn = (side == RaySide::ccw) ? 1.0 : -1.0;
  for (size_t l = 0; l < sing_.size(); ++l) {
    const Singularity& s = sing_[l];
    cplx u = z * std::conj(s.w());
    cplx li, le;
    if (static_cast<int>(l) == ray && r > 1.0)
      li = cplx(std::log(r - 1.0), -sgn * kPi);
    else
      li = std::log(1.0 - u);
    if (static_cast<int>(l) == ray && r < 1.0)
      le = cplx(std::log(1.0 / r - 1.0), sgn * kPi);
    else
      le = std::log(1.0 - 1.0 / u);
    expo += 0.5 * s.beta * (li + le);
  }
  return std::exp(expo);
}

cplx eval_v(long M, cplx z) {
  double r = std::abs(z);
  if (std::abs(r - 1.0) < 1e-14)
    throw std::domain_error("eval_v: |z| = 1");
  cplx p = (r < 1.0) ? std::pow(z, static_cast<double>(M))
                     : std::pow(z, -static_cast<double>(M));
  cplx d = 1.0 - p;
  if (d == 0.0) throw std::domain_error("eval_v: z is an M-th root of unity");
  return p / d;
}

namespace {

std::string angle_to_string(const Singularity& s) {
  if (s.is_exact()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "pi*%ld/%ld", s.num, s.den);
    return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", s.theta);
  return buf;
}

Singularity parse_angle(const nlohmann::json& j, double beta) {
  if (j.is_number()) return Singularity::at_angle(j.get<double>(), beta);
  std::string s = j.get<std::string>();
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  long sign = 1;
  if (!t.empty() && t[0] == '-') { sign = -1; t = t.substr(1); }
  long p = 1, q = 1;
  if (t == "0") return Singularity::at_pi_rational(0, 1, beta);
  if (t == "pi") return Singularity::at_pi_rational(sign, 1, beta);
  if (std::sscanf(t.c_str(), "pi*%ld/%ld", &p, &q) == 2)
    return Singularity::at_pi_rational(sign * p, q, beta);
  if (std::sscanf(t.c_str(), "pi*%ld", &p) == 1)
    return Singularity::at_pi_rational(sign * p, 1, beta);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end && *end == '\0') return Singularity::at_angle(v, beta);
  throw std::invalid_argument("symbol: cannot parse angle '" + s + "'");
}

} // namespace

std::string FHSymbol::to_json() const {
  nlohmann::json j;
  j["alpha"] = nlohmann::json::array();
  for (const cplx& a : alpha_) j["alpha"].push_back({a.real(), a.imag()});
  j["singularities"] = nlohmann::json::array();
  for (const Singularity& s : sing_) {
    nlohmann::json e;
    if (s.is_exact())
      e["theta"] = angle_to_string(s);
    else
      e["theta"] = s.theta;
    e["beta"] = s.beta;
    j["singularities"].push_back(e);
  }
  return j.dump();
}

FHSymbol FHSymbol::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("symbol: bad json: ") + e.what());
  }
  std::vector<cplx> alpha;
  if (j.contains("alpha"))
    for (const auto& a : j["alpha"]) {
      if (a.is_array())
        alpha.emplace_back(a.at(0).get<double>(), a.size() > 1 ? a.at(1).get<double>() : 0.0);
      else
        alpha.emplace_back(a.get<double>(), 0.0);
    }
  std::vector<Singularity> sing;
  if (j.contains("singularities"))
    for (const auto& e : j["singularities"])
      sing.push_back(parse_angle(e.at("theta"), e.at("beta").get<double>()));
  return FHSymbol(std::move(alpha), std::move(sing));
}

} // namespace loggas
