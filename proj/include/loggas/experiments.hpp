#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "loggas/sampler.hpp"
#include "loggas/symbol.hpp"

namespace loggas {

// Shared configuration for the numbered experiments; each one reads the
// fields it needs.  Parsed from JSON, unknown keys rejected.
struct ExperimentConfig {
  std::string symbol_json; // empty: experiment picks its default symbol
  std::vector<double> betas{0.5, 1.0};
  std::vector<int> Ns;
  std::vector<long> Ms;
  double beta = 1.0;
  double epsilon = 0.0; // 0: automatic
  int arc_order = 24;
  int segment_order = 64;
  double tol = 1e-6;
  int L = 3;
  double theta = 0.0;
  double delta = 1.5707963267948966; // theta' - theta
  double t0 = 0.4;
  double q = 0.5;
  int grid = 12;
  int fourier_mode = 1; // test function cos(n theta) for e4/e5
  long samples = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool reproducible = false;
  std::string out; // output path; the --out flag wins over this

  FHSymbol symbol_or(const FHSymbol& fallback) const;

  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

// One output row of an experiment grid.  id goes in the first column and is
// the resume key: rows already present in the output file are not recomputed.
struct CellTask {
  std::string id;
  std::function<std::vector<std::string>()> run;
};

// Runs the missing cells (chunk-parallel over `threads`, output order fixed
// by the task list, each row flushed as written) and returns the full table,
// previously existing rows included.  Empty path writes to stdout without
// resume.  The schema line of an existing file must match.
std::map<std::string, std::vector<std::string>> run_cells(
    const std::string& path, const std::string& schema,
    const std::vector<std::string>& columns, const std::vector<CellTask>& cells,
    int threads, bool reproducible);

// count independent gas samples with per-sample RNG streams, so the result is
// the same for every thread count
std::vector<GasSample> draw_samples(int N, long M, long count,
                                    std::uint64_t seed, int threads);

// e1: factorization identity T = T_cont * det(I+K) over a
//     beta x singularity-set x (N,M) grid
// e2: det(I+K) against N/M for singular and smooth symbols, slope fits
// e3: Fisher-Hartwig ratio sweep, plus the merging-singularity envelope with
//     its unexplained sigma residual
// e4: variance integrands I1, I2, I3 on a (theta, theta') grid
// e5: sampled linear statistics and the empirical measure against the
//     truncated-GMC reference
// e6: dense regime N/M = q fixed
// return 0, or 2 when a tolerance-gated row fails (e1 only)
int run_e1(const ExperimentConfig& cfg, const std::string& out_path);
int run_e2(const ExperimentConfig& cfg, const std::string& out_path);
int run_e3(const ExperimentConfig& cfg, const std::string& out_path);
int run_e4(const ExperimentConfig& cfg, const std::string& out_path);
int run_e5(const ExperimentConfig& cfg, const std::string& out_path);
int run_e6(const ExperimentConfig& cfg, const std::string& out_path);

} // namespace loggas
