#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "loggas/csvio.hpp"
#include "loggas/experiments.hpp"
#include "loggas/fredholm.hpp"
#include "loggas/gmc.hpp"
#include "loggas/opuc.hpp"
#include "loggas/rng.hpp"
#include "loggas/sampler.hpp"
#include "loggas/symbol.hpp"
#include "loggas/toeplitz.hpp"

namespace {

using namespace loggas;

FHSymbol default_symbol() {
  return FHSymbol({}, {Singularity::at_pi_rational(0, 1, 1.0)});
}

int run(int argc, char** argv) {
  CLI::App app{"discrete log-gas and Toeplitz determinant toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, symbol_json;
  std::uint64_t seed = 1;
  int threads = 1;
  bool reproducible = false;
  app.add_option("--config", config_path, "JSON config file");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
  auto* out_opt = app.add_option("--out", out_path, "output CSV (default stdout)");
  app.add_flag("--reproducible", reproducible,
               "omit the timestamp line so identical runs are byte identical");
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads for grid cells");

  const char* enames[] = {"e1", "e2", "e3", "e4", "e5", "e6"};
  const char* edesc[] = {
      "factorization identity sweep",  "Fredholm determinant scaling",
      "Fisher-Hartwig moment ratios",  "variance integrands I1, I2, I3",
      "gas sampling vs GMC reference", "dense regime q = N/M"};
  CLI::App* esub[6];
  for (int i = 0; i < 6; ++i) {
    esub[i] = app.add_subcommand(enames[i], edesc[i]);
    esub[i]->fallthrough();
  }

  long M = 0;
  int N = 8, order = 16, degree = 16, L = 8, grid = 256;
  long count = 1;
  double epsilon = 0.0, beta = 1.0, tol = 1e-12;

  auto* cmoments = app.add_subcommand("moments", "Fourier moments of a symbol");
  cmoments->fallthrough();
  cmoments->add_option("--symbol", symbol_json, "symbol as inline JSON");
  cmoments->add_option("--M", M, "lattice size, 0 for continuum moments");
  cmoments->add_option("--order", order, "highest moment order");
  cmoments->add_option("--tol", tol, "continuum quadrature tolerance");

  auto* copuc = app.add_subcommand("opuc", "Verblunsky coefficients of a symbol");
  copuc->fallthrough();
  copuc->add_option("--symbol", symbol_json, "symbol as inline JSON");
  copuc->add_option("--M", M, "lattice size, 0 for the continuum measure");
  copuc->add_option("--n", degree, "basis degree");

  auto* cfred = app.add_subcommand(
      "fredholm", "det(I+K) and the discrete/continuum determinant ratio");
  cfred->fallthrough();
  cfred->add_option("--symbol", symbol_json, "symbol as inline JSON");
  cfred->add_option("--N", N, "determinant size")->required();
  cfred->add_option("--M", M, "lattice size")->required();
  cfred->add_option("--epsilon", epsilon, "contour offset, 0 for automatic");

  auto* csample = app.add_subcommand("sample", "exact DPP samples of the gas");
  csample->fallthrough();
  csample->add_option("--N", N, "points per sample");
  csample->add_option("--M", M, "lattice size")->required();
  csample->add_option("--count", count, "number of samples");

  auto* cgmc = app.add_subcommand("gmc", "truncated GMC field and density dumps");
  cgmc->fallthrough();
  cgmc->add_option("--L", L, "truncation level");
  cgmc->add_option("--beta", beta, "GMC inverse temperature");
  cgmc->add_option("--count", count, "number of field draws");
  cgmc->add_option("--grid", grid, "theta grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = ExperimentConfig::from_json_file(config_path);
  if (seed_opt->count()) cfg.seed = seed;
  if (threads_opt->count()) cfg.threads = threads;
  if (reproducible) cfg.reproducible = true;
  if (out_opt->count()) cfg.out = out_path;
  if (!symbol_json.empty()) cfg.symbol_json = symbol_json;
  const std::string out = cfg.out;

  auto with_out = [&](const std::function<void(std::ostream&)>& fn) {
    if (out.empty()) {
      fn(std::cout);
      return;
    }
    std::ofstream ofs(out);
    if (!ofs) throw std::invalid_argument("cannot write " + out);
    fn(ofs);
  };

  for (int i = 0; i < 6; ++i)
    if (app.got_subcommand(esub[i])) {
      static int (*const runners[])(const ExperimentConfig&,
                                    const std::string&) = {
          run_e1, run_e2, run_e3, run_e4, run_e5, run_e6};
      return runners[i](cfg, out);
    }

  if (app.got_subcommand(cmoments)) {
    FHSymbol f = cfg.symbol_or(default_symbol());
    MomentTable t = M == 0 ? MomentTable::continuum(f, order, tol)
                           : MomentTable::discrete(f, M, order);
    with_out([&](std::ostream& os) { t.write_csv(os, cfg.reproducible); });
    return 0;
  }
  if (app.got_subcommand(copuc)) {
    FHSymbol f = cfg.symbol_or(default_symbol());
    MomentTable t = M == 0 ? MomentTable::continuum(f, degree)
                           : MomentTable::discrete(f, M, degree);
    OPUCBasis basis = OPUCBasis::build(t, degree);
    with_out([&](std::ostream& os) { basis.write_csv(os, cfg.reproducible); });
    return 0;
  }
  if (app.got_subcommand(cfred)) {
    FHSymbol f = cfg.symbol_or(default_symbol());
    LogDet T = expectation_product(f, N, M);
    OPUCBasis basis = OPUCBasis::build(MomentTable::continuum(f, N), N);
    const double ltc = basis.log_toeplitz_det(N);
    FredholmResult fr = fredholm_det(f, basis, N, M,
                                     cfred->count("--epsilon") ? epsilon
                                                               : cfg.epsilon,
                                     {cfg.arc_order, cfg.segment_order});
    with_out([&](std::ostream& os) {
      csv_header(os, "fredholm",
                 {"N", "M", "epsilon", "log_T", "log_T_cont", "det", "det_imag",
                  "trace_re", "trace_im", "hs_norm", "res_err", "residual"},
                 cfg.reproducible);
      double residual = std::numeric_limits<double>::infinity();
      if (!T.singular() && fr.det > 0.0)
        residual = std::abs(
            std::exp(T.log_abs - ltc - std::log(fr.det)) * T.phase.real() - 1.0);
      os << N << ',' << M << ',' << fmt_g17(fr.epsilon) << ','
         << fmt_g17(T.log_abs) << ',' << fmt_g17(ltc) << ',' << fmt_g17(fr.det)
         << ',' << fmt_g17(fr.det_imag) << ',' << fmt_g17(fr.trace.real())
         << ',' << fmt_g17(fr.trace.imag()) << ',' << fmt_g17(fr.hs_norm)
         << ',' << fmt_g17(fr.resolution_error) << ',' << fmt_g17(residual)
         << '\n';
    });
    return 0;
  }
  if (app.got_subcommand(csample)) {
    if (N > M) throw std::invalid_argument("sample: need N <= M");
    auto samples = draw_samples(N, M, count, cfg.seed, cfg.threads);
    with_out([&](std::ostream& os) {
      csv_header(os, "samples", {"sample_id", "index"}, cfg.reproducible);
      for (long k = 0; k < count; ++k)
        for (int idx : samples[k].sites) os << k << ',' << idx << '\n';
    });
    return 0;
  }
  if (app.got_subcommand(cgmc)) {
    with_out([&](std::ostream& os) {
      csv_header(os, "gmc", {"sample_id", "theta", "X", "density"},
                 cfg.reproducible);
      if (!gmc_subcritical(beta))
        os << "# warning=beta at or above 2, the limiting measure vanishes\n";
      for (long k = 0; k < count; ++k) {
        KeyedRng rng(cfg.seed, static_cast<std::uint64_t>(k));
        FieldSample fs = sample_field(L, rng);
        for (int i = 0; i < grid; ++i) {
          double t = kTwoPi * i / grid;
          os << k << ',' << fmt_g17(t) << ',' << fmt_g17(fs.eval(t)) << ','
             << fmt_g17(gmc_density(fs, beta, t)) << '\n';
        }
      }
    });
    return 0;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::overflow_error& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 3;
  }
}
