#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "loggas/asymptotics.hpp"
#include "loggas/experiments.hpp"
#include "loggas/fredholm.hpp"
#include "loggas/gmc.hpp"
#include "loggas/opuc.hpp"
#include "loggas/rng.hpp"
#include "loggas/sampler.hpp"
#include "loggas/toeplitz.hpp"

namespace py = pybind11;
using namespace loggas;

namespace {

FHSymbol make_symbol(std::vector<cplx> alpha,
                     const std::vector<std::pair<double, double>>& sings) {
  std::vector<Singularity> s;
  for (auto [theta, beta] : sings)
    s.push_back(Singularity::at_angle(theta, beta));
  return FHSymbol(std::move(alpha), std::move(s));
}

OPUCBasis basis_for(const FHSymbol& f, int n) {
  return OPUCBasis::build(MomentTable::continuum(f, n), n);
}

std::vector<cplx> table_coeffs(const MomentTable& t) {
  std::vector<cplx> out(t.max_order() + 1);
  for (int k = 0; k <= t.max_order(); ++k) out[k] = t.at(k);
  return out;
}

} // namespace

PYBIND11_MODULE(_loggas, m) {
  m.doc() = "Discrete log-gas Toeplitz determinants with Fisher-Hartwig symbols";

  py::class_<Singularity>(m, "Singularity")
      .def_readonly("theta", &Singularity::theta)
      .def_readonly("beta", &Singularity::beta)
      .def_readonly("num", &Singularity::num)
      .def_readonly("den", &Singularity::den)
      .def("is_exact", &Singularity::is_exact);

  py::class_<FHSymbol>(m, "FHSymbol")
      .def(py::init(&make_symbol), py::arg("alpha") = std::vector<cplx>{},
           py::arg("singularities") = std::vector<std::pair<double, double>>{},
           "Symbol e^V times prod |z - w_j|^beta_j; singularities given as "
           "(theta, beta) pairs")
      .def_static("from_json", &FHSymbol::from_json, py::arg("text"))
      .def("to_json", &FHSymbol::to_json)
      .def_property_readonly("alpha", &FHSymbol::alpha)
      .def_property_readonly("singularities", &FHSymbol::singularities)
      .def("eval_on_circle", &FHSymbol::eval_on_circle, py::arg("theta"))
      .def("__call__", &FHSymbol::eval_on_circle, py::arg("theta"));

  py::class_<LogDet>(m, "LogDet")
      .def_readonly("log_abs", &LogDet::log_abs)
      .def_readonly("phase", &LogDet::phase)
      .def_readonly("positive_definite", &LogDet::positive_definite)
      .def("singular", &LogDet::singular)
      .def("value", &LogDet::value);

  py::class_<FredholmResult>(m, "FredholmResult")
      .def_readonly("det", &FredholmResult::det)
      .def_readonly("det_imag", &FredholmResult::det_imag)
      .def_readonly("trace", &FredholmResult::trace)
      .def_readonly("hs_norm", &FredholmResult::hs_norm)
      .def_readonly("resolution_error", &FredholmResult::resolution_error)
      .def_readonly("epsilon", &FredholmResult::epsilon);

  py::class_<FHParts>(m, "FHParts")
      .def_readonly("szego", &FHParts::szego)
      .def_readonly("singularity_potential", &FHParts::singularity_potential)
      .def_readonly("power", &FHParts::power)
      .def_readonly("interaction", &FHParts::interaction)
      .def_readonly("barnes", &FHParts::barnes)
      .def("total", &FHParts::total);

  m.def("expectation_product", &expectation_product, py::arg("symbol"),
        py::arg("N"), py::arg("M"),
        "E prod_j f(z_j) over the N-point gas on the M lattice, equal to the "
        "discrete Toeplitz determinant T_{N-1}(f)");
  m.def(
      "continuum_logdet",
      [](const FHSymbol& f, int N) {
        return toeplitz_logdet(MomentTable::continuum(f, N), N);
      },
      py::arg("symbol"), py::arg("N"),
      "classical Toeplitz determinant of the integral Fourier coefficients");
  m.def(
      "discrete_moments",
      [](const FHSymbol& f, long M, int max_order) {
        return table_coeffs(MomentTable::discrete(f, M, max_order));
      },
      py::arg("symbol"), py::arg("M"), py::arg("max_order"));
  m.def(
      "continuum_moments",
      [](const FHSymbol& f, int max_order) {
        return table_coeffs(MomentTable::continuum(f, max_order));
      },
      py::arg("symbol"), py::arg("max_order"));
  m.def(
      "verblunsky",
      [](const FHSymbol& f, int n) { return basis_for(f, n).verblunsky(); },
      py::arg("symbol"), py::arg("n"),
      "Verblunsky coefficients alpha_0..alpha_{n-1} of the continuum measure");
  m.def(
      "fredholm_det",
      [](const FHSymbol& f, int N, long M, double epsilon) {
        return fredholm_det(f, basis_for(f, N), N, M, epsilon);
      },
      py::arg("symbol"), py::arg("N"), py::arg("M"), py::arg("epsilon") = 0.0,
      "det(I+K) for the discrete/continuum correction kernel");
  m.def("partition_log", &partition_log, py::arg("N"), py::arg("M"),
        "log Z_{N,M} = log(N! M^N)");
  m.def("fh_prediction", &fh_prediction, py::arg("symbol"), py::arg("N"));
  m.def("fh_ratio", &fh_ratio, py::arg("symbol"), py::arg("N"), py::arg("M"),
        "T_{N-1}(f) divided by the Fisher-Hartwig prediction");
  m.def("log_barnes_g", &log_barnes_g, py::arg("x"));

  m.def(
      "sample_gas",
      [](int N, long M, long count, std::uint64_t seed) {
        std::vector<std::vector<int>> out;
        out.reserve(count);
        for (auto& g : draw_samples(N, M, count, seed, 1))
          out.push_back(std::move(g.sites));
        return out;
      },
      py::arg("N"), py::arg("M"), py::arg("count") = 1, py::arg("seed") = 1,
      "exact DPP samples as sorted site indices, one independent RNG stream "
      "per sample");
  m.def("support_probability", &support_probability, py::arg("N"),
        py::arg("M"), py::arg("support"));
  m.def("brute_force_pmf", &brute_force_pmf, py::arg("N"), py::arg("M"));
  m.def("enumerate_supports", &enumerate_supports, py::arg("N"), py::arg("M"));
  m.def(
      "log_char_poly",
      [](const std::vector<int>& sites, long M, double theta, double beta) {
        GasSample s{sites};
        return log_char_poly(s, M, theta, beta);
      },
      py::arg("sites"), py::arg("M"), py::arg("theta"), py::arg("beta"));
  m.def(
      "power_sums",
      [](const std::vector<int>& sites, long M, int L) {
        GasSample s{sites};
        return power_sums(s, M, L);
      },
      py::arg("sites"), py::arg("M"), py::arg("L"));

  m.def("harmonic_number", &harmonic_number, py::arg("L"));
  m.def("gmc_log_normalizer", &gmc_log_normalizer, py::arg("L"),
        py::arg("beta"));
  m.def("gmc_covariance", &covariance_exact, py::arg("L"), py::arg("dtheta"));
  m.def("gmc_subcritical", &gmc_subcritical, py::arg("beta"));
  m.def(
      "sample_field",
      [](int L, long count, std::uint64_t seed) {
        std::vector<std::vector<cplx>> out;
        out.reserve(count);
        KeyedRng rng(seed, 0);
        for (long k = 0; k < count; ++k)
          out.push_back(loggas::sample_field(L, rng).Z);
        return out;
      },
      py::arg("L"), py::arg("count") = 1, py::arg("seed") = 1,
      "gaussian coefficients Z_1..Z_L of truncated log-correlated fields");
  m.def(
      "field_eval",
      [](const std::vector<cplx>& Z, double theta) {
        FieldSample fs{static_cast<int>(Z.size()), Z};
        return fs.eval(theta);
      },
      py::arg("Z"), py::arg("theta"));
  m.def(
      "gmc_density",
      [](const std::vector<cplx>& Z, double beta, double theta) {
        FieldSample fs{static_cast<int>(Z.size()), Z};
        return gmc_density(fs, beta, theta);
      },
      py::arg("Z"), py::arg("beta"), py::arg("theta"));
}
