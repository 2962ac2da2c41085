#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "loggas/experiments.hpp"
#include "loggas/rng.hpp"
#include "loggas/sampler.hpp"

using namespace loggas;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  bool saw_columns = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {
      saw_columns = true;
      continue;
    }
    out.push_back(line);
  }
  return out;
}

CellTask make_row(const std::string& id, const std::string& payload) {
  return {id, [id, payload]() { return std::vector<std::string>{id, payload}; }};
}

CellTask poisoned(const std::string& id) {
  return {id, [id]() -> std::vector<std::string> {
            throw std::logic_error("cell " + id + " should not run");
          }};
}

const std::vector<std::string> kCols = {"cell", "value"};

} // namespace

TEST_CASE("run_cells writes, resumes and keeps task order") {
  const std::string path = "loggas_test_cells.csv";
  std::remove(path.c_str());
  auto t1 = run_cells(path, "probe", kCols, {make_row("a", "1"), make_row("b", "2")},
                      1, true);
  CHECK(t1.at("a")[1] == "1");
  CHECK(t1.at("b")[1] == "2");
  std::string text = slurp(path);
  CHECK(text.rfind("# schema=probe/1\n", 0) == 0);
  CHECK(text.find("cell,value\n") != std::string::npos);

  // all rows known: the poisoned closures must never fire
  auto t2 = run_cells(path, "probe", kCols, {poisoned("a"), poisoned("b")}, 1, true);
  CHECK(t2.at("a")[1] == "1");
  CHECK(slurp(path) == text);

  // a new cell ahead of the recovered ones lands first in the file
  auto t3 = run_cells(path, "probe", kCols,
                      {make_row("c", "3"), poisoned("a"), poisoned("b")}, 1, true);
  CHECK(t3.size() == 3);
  auto rows = data_lines(slurp(path));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "c,3");
  CHECK(rows[1] == "a,1");
  CHECK(rows[2] == "b,2");
  std::remove(path.c_str());
}

TEST_CASE("run_cells rejects a schema mismatch") {
  const std::string path = "loggas_test_schema.csv";
  std::remove(path.c_str());
  run_cells(path, "one", kCols, {make_row("a", "1")}, 1, true);
  CHECK_THROWS_AS(run_cells(path, "two", kCols, {make_row("a", "1")}, 1, true),
                  std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("run_cells sanitizes field separators") {
  const std::string path = "loggas_test_sep.csv";
  std::remove(path.c_str());
  run_cells(path, "probe", kCols, {make_row("a", "x,y\nz")}, 1, true);
  auto rows = data_lines(slurp(path));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == "a,x;y;z");
  std::remove(path.c_str());
}

TEST_CASE("run_cells validates produced rows") {
  std::ostringstream cap;
  auto* old = std::cout.rdbuf(cap.rdbuf());
  CHECK_THROWS_AS(
      run_cells("", "probe", kCols,
                {{"a", []() { return std::vector<std::string>{"b", "1"}; }}}, 1,
                true),
      std::runtime_error);
  CHECK_THROWS_AS(
      run_cells("", "probe", kCols,
                {{"a", []() { return std::vector<std::string>{"a"}; }}}, 1, true),
      std::runtime_error);
  std::cout.rdbuf(old);
}

TEST_CASE("run_cells stdout mode") {
  std::ostringstream cap;
  auto* old = std::cout.rdbuf(cap.rdbuf());
  auto t = run_cells("", "probe", kCols, {make_row("a", "7")}, 1, true);
  std::cout.rdbuf(old);
  CHECK(t.at("a")[1] == "7");
  CHECK(cap.str() == "# schema=probe/1\ncell,value\na,7\n");
}

TEST_CASE("run_cells parallel batches match serial output") {
  const std::string p1 = "loggas_test_par1.csv", p2 = "loggas_test_par2.csv";
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  std::vector<CellTask> cells;
  for (int i = 0; i < 7; ++i)
    cells.push_back(make_row("c" + std::to_string(i), std::to_string(i * i)));
  run_cells(p1, "probe", kCols, cells, 1, true);
  run_cells(p2, "probe", kCols, cells, 3, true);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("config defaults and validation") {
  ExperimentConfig cfg = ExperimentConfig::from_json("{}");
  CHECK(cfg.betas == std::vector<double>{0.5, 1.0});
  CHECK(cfg.Ns.empty());
  CHECK(cfg.L == 3);
  CHECK(cfg.grid == 12);
  CHECK(cfg.samples == 10000);
  CHECK(cfg.threads == 1);
  CHECK(cfg.seed == 1);
  CHECK(!cfg.reproducible);
  CHECK(cfg.tol == 1e-6);

  CHECK(ExperimentConfig::from_json("{\"seed\": 123}").seed == 123);
  CHECK(ExperimentConfig::from_json("{\"experiment\": \"e1\"}").L == 3);

  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"nope\": 1}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{bad"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("[1]"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"betas\": [0.5, 9]}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"epsilon\": 0.5}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"threads\": 0}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"samples\": 1}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_file("no_such_config.json"),
                  std::invalid_argument);
}

TEST_CASE("config symbol passthrough") {
  ExperimentConfig cfg = ExperimentConfig::from_json(
      "{\"symbol\": {\"singularities\": [{\"theta\": \"pi\", \"beta\": 1.5}]}}");
  FHSymbol f = cfg.symbol_or(FHSymbol());
  REQUIRE(f.singularities().size() == 1);
  CHECK(f.singularities()[0].num == 1);
  CHECK(f.singularities()[0].den == 1);
  CHECK(f.singularities()[0].beta == 1.5);
  CHECK(ExperimentConfig::from_json("{}").symbol_or(f).singularities().size() == 1);
}

TEST_CASE("draw_samples is thread count invariant") {
  auto a = draw_samples(3, 9, 10, 5, 1);
  auto b = draw_samples(3, 9, 10, 5, 4);
  REQUIRE(a.size() == 10);
  for (int k = 0; k < 10; ++k) {
    CHECK(a[k].sites == b[k].sites);
    KeyedRng rng(5, k);
    CHECK(a[k].sites == sample_gas(3, 9, rng).sites);
  }
}

TEST_CASE("e1 on a small grid passes its own gate") {
  const std::string path = "loggas_test_e1.csv";
  std::remove(path.c_str());
  ExperimentConfig cfg = ExperimentConfig::from_json(
      "{\"Ns\": [2], \"Ms\": [8], \"tol\": 1e-6}");
  CHECK(run_e1(cfg, path) == 0);
  auto rows = data_lines(slurp(path));
  CHECK(rows.size() == 6);
  CHECK(run_e1(cfg, path) == 0);
  CHECK(data_lines(slurp(path)).size() == 6);
  std::remove(path.c_str());

  ExperimentConfig bad = ExperimentConfig::from_json("{\"Ns\": [4], \"Ms\": [2]}");
  CHECK_THROWS_AS(run_e1(bad, ""), std::invalid_argument);
}

TEST_CASE("e2 produces finite slopes") {
  const std::string path = "loggas_test_e2.csv";
  std::remove(path.c_str());
  ExperimentConfig cfg =
      ExperimentConfig::from_json("{\"Ns\": [4], \"Ms\": [8, 16]}");
  CHECK(run_e2(cfg, path) == 0);
  std::string text = slurp(path);
  auto rows = data_lines(text);
  CHECK(rows.size() == 7);
  bool saw_sing = false, saw_smooth = false;
  for (const auto& r : rows) {
    auto comma = r.find(',');
    std::string id = r.substr(0, comma);
    if (id == "slope_singular" || id == "slope_smooth") {
      auto last = r.rfind(',');
      double v = std::strtod(r.c_str() + last + 1, nullptr);
      CHECK(std::isfinite(v));
      (id == "slope_singular" ? saw_sing : saw_smooth) = true;
    }
  }
  CHECK(saw_sing);
  CHECK(saw_smooth);
  std::remove(path.c_str());
}

TEST_CASE("e4 summaries are consistent with nonnegative variance") {
  const std::string path = "loggas_test_e4.csv";
  std::remove(path.c_str());
  ExperimentConfig cfg = ExperimentConfig::from_json(
      "{\"Ns\": [4], \"Ms\": [16], \"grid\": 4, \"L\": 1, \"beta\": 1.0}");
  CHECK(run_e4(cfg, path) == 0);
  std::string text = slurp(path);
  auto rows = data_lines(text);
  // 16 pair cells, 16 full cells, I1/I2/I3/combo/I1flat summaries
  CHECK(rows.size() == 16 + 16 + 5);
  double combo = 0, i1flat_v = 0, i1flat_r = 0;
  for (const auto& r : rows) {
    auto f = r.substr(0, r.find(','));
    std::istringstream ss(r);
    std::vector<std::string> fields;
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    if (f == "combo_L1") {
      REQUIRE(fields.size() >= 11);
      combo = std::strtod(fields[10].c_str(), nullptr);
    }
    if (f == "I1flat_L1") {
      REQUIRE(fields.size() >= 12);
      i1flat_v = std::strtod(fields[10].c_str(), nullptr);
      i1flat_r = std::strtod(fields[11].c_str(), nullptr);
    }
  }
  CHECK(combo >= -1e-8);
  CHECK(i1flat_v > 0.0);
  CHECK(i1flat_r > 0.0);
  CHECK(std::isfinite(i1flat_v));
  std::remove(path.c_str());
}

TEST_CASE("e6 covers the dense regime grid") {
  const std::string path = "loggas_test_e6.csv";
  std::remove(path.c_str());
  ExperimentConfig cfg = ExperimentConfig::from_json("{\"Ns\": [4]}");
  CHECK(run_e6(cfg, path) == 0);
  auto rows = data_lines(slurp(path));
  CHECK(rows.size() == 3);
  for (const auto& r : rows) {
    auto last = r.rfind(',');
    double ratio = std::strtod(r.c_str() + last + 1, nullptr);
    CHECK(std::isfinite(ratio));
    CHECK(ratio > 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("e5 statistics on a small run") {
  const std::string path = "loggas_test_e5.csv";
  std::remove(path.c_str());
  ExperimentConfig cfg = ExperimentConfig::from_json(
      "{\"Ns\": [8], \"Ms\": [16], \"samples\": 200, \"L\": 2, \"grid\": 4, "
      "\"beta\": 1.0, \"seed\": 7}");
  CHECK(run_e5(cfg, path) == 0);
  auto rows = data_lines(slurp(path));
  CHECK(rows.size() == 9 + 6);
  bool saw_mass = false;
  for (const auto& r : rows) {
    std::istringstream ss(r);
    std::vector<std::string> fields;
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    if (fields[0] == "mass") {
      REQUIRE(fields.size() == 7);
      saw_mass = true;
      double mean = std::strtod(fields[3].c_str(), nullptr);
      double se = std::strtod(fields[4].c_str(), nullptr);
      CHECK(se > 0.0);
      CHECK(std::abs(mean - 1.0) < 5.0 * se);
    }
  }
  CHECK(saw_mass);
  std::remove(path.c_str());
}

TEST_CASE("reproducible runs are byte identical") {
  const std::string p1 = "loggas_test_rep1.csv", p2 = "loggas_test_rep2.csv";
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  ExperimentConfig cfg = ExperimentConfig::from_json(
      "{\"Ns\": [4], \"reproducible\": true}");
  CHECK(run_e6(cfg, p1) == 0);
  CHECK(run_e6(cfg, p2) == 0);
  std::string a = slurp(p1), b = slurp(p2);
  CHECK(a == b);
  CHECK(a.find("generated") == std::string::npos);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
