// Copyright 2026 The lsgauss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lsgauss/error.hpp"
#include "lsgauss/gausslim.hpp"
#include "lsgauss/harness.hpp"

using namespace lsg;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in, "test.cfg");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("lsgauss_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& f) const { return (path / f).string(); }
};

ExperimentConfig small_power_config() {
  ExperimentConfig cfg;
  cfg.n = 400;
  cfg.reps = 600;
  cfg.cv_reps = 2000;
  cfg.mu_grid = {0.0, 0.05, 0.1};
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config file parsing") {
  std::istringstream in(
      "# power study setup\n"
      "[procgen]\n"
      "kind = exp_sine_shift\n"
      "frequency = 6pi\n"
      "\n"
      "[sumproc]\n"
      "k_n_exponent = 2/3   # trailing comment\n"
      "[harness]\n"
      "n = 1000\n"
      "mu_grid = 0:0.01:0.03\n"
      "statistics = studentized\n");
  const ExperimentConfig cfg = parse_config(in);
  CHECK(cfg.n == 1000);
  CHECK(cfg.k_n() == 99);  // floor(1000^{2/3}) with 1000^{2/3} = 99.99...
  CHECK(cfg.frequency == doctest::Approx(6.0 * M_PI));
  REQUIRE(cfg.mu_grid.size() == 4);
  CHECK(cfg.mu_grid[3] == doctest::Approx(0.03));
  CHECK(cfg.statistics == std::vector<StatisticKind>{StatisticKind::Studentized});
}

TEST_CASE("config errors carry line and key context") {
  CHECK(contains(config_error("[harness]\nbogus = 1\n"), "test.cfg:2"));
  CHECK(contains(config_error("[harness]\nbogus = 1\n"), "bogus"));
  CHECK(contains(config_error("[nowhere]\n"), "test.cfg:1"));
  CHECK(contains(config_error("n = 5\n"), "outside"));
  CHECK(contains(config_error("[harness]\nn = ten\n"), "test.cfg:2"));
  CHECK(contains(config_error("[harness]\nn = ten\n"), "harness.n"));
  CHECK(contains(config_error("[harness]\nalpha\n"), "key = value"));
  CHECK(contains(config_error("[procgen]\nkind = arma\n"), "kind"));

  ExperimentConfig cfg;
  cfg.alpha = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_NOTHROW(cfg.validate(true));
  cfg.alpha = 0.05;
  cfg.reps = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.reps = 10;
  cfg.n = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/lsgauss.cfg"), Error);
}

TEST_CASE("canonical listing round trips through the parser") {
  ExperimentConfig cfg;
  set_config_value(cfg, "procgen.kind", "tv_ar1");
  set_config_value(cfg, "phi", "0.3");
  set_config_value(cfg, "mu_grid", "0, 0.004, 0.008");
  set_config_value(cfg, "coupling_ladder", "100,200");
  // Regroup "section.key = value" lines under section headers.
  std::istringstream lines(cfg.canonical());
  std::string text, section;
  for (std::string line; std::getline(lines, line);) {
    const auto dot = line.find('.');
    const std::string s = line.substr(0, dot);
    if (s != section) text += "[" + (section = s) + "]\n";
    text += line.substr(dot + 1) + "\n";
  }
  std::istringstream in(text);
  const ExperimentConfig back = parse_config(in);
  CHECK(back.canonical() == cfg.canonical());
  CHECK(back.digest() == cfg.digest());
  CHECK(get_config_value(cfg, "rates.coupling_ladder") == "100,200");
  CHECK(get_config_value(cfg, "threads") == "1");

  ExperimentConfig threaded = cfg;
  threaded.threads = 8;
  threaded.output_path = "elsewhere.csv";
  CHECK(threaded.digest() == cfg.digest());
  threaded.base_seed += 1;
  CHECK(threaded.digest() != cfg.digest());
}

TEST_CASE("outputs never overwrite existing files") {
  const TempDir dir("resume");
  const std::string p = dir.file("report.csv");
  CHECK(fresh_output_path(p) == p);
  std::ofstream(p) << "x\n";
  CHECK(fresh_output_path(p) == dir.file("report.1.csv"));
  std::ofstream(dir.file("report.1.csv")) << "x\n";
  CHECK(fresh_output_path(p) == dir.file("report.2.csv"));

  ExperimentConfig cfg = small_power_config();
  cfg.reps = 50;
  cfg.output_path = p;
  const MonteCarloReport r = run_power_table(cfg);
  CHECK(r.written_path == dir.file("report.2.csv"));
  CHECK(slurp(p) == "x\n");
}

TEST_CASE("power table") {
  const TempDir dir("power");
  ExperimentConfig cfg = small_power_config();
  cfg.output_path = dir.file("power.csv");
  const MonteCarloReport r = run_power_table(cfg);
  REQUIRE(r.rows.size() == 6);
  for (const PowerRow& row : r.rows) {
    CHECK(row.power >= 0.0);
    CHECK(row.power <= 1.0);
    CHECK(row.binom_stderr == doctest::Approx(std::sqrt(row.power * (1 - row.power) / row.reps)));
    CHECK(row.reps == cfg.reps);
    CHECK(row.base_seed == cfg.base_seed);
  }
  for (StatisticKind k : {StatisticKind::Plain, StatisticKind::Studentized}) {
    const double p0 = r.find(0.0, k)->power, p1 = r.find(0.05, k)->power, p2 = r.find(0.1, k)->power;
    const double se = std::sqrt(0.25 / cfg.reps);
    CHECK(p1 >= p0 - 2 * se);
    CHECK(p2 >= p1 - 2 * se);
  }
  // Plain statistic uses the true-curve critical value, the studentized one sup |W|.
  CHECK(r.find(0.0, StatisticKind::Plain)->critical_value > 2.9);
  CHECK(std::abs(r.find(0.0, StatisticKind::Studentized)->critical_value - sup_abs_bm_quantile(0.95)) < 0.15);

  const std::string csv = slurp(r.written_path);
  CHECK(csv.rfind("mu,statistic,power,reps,n,critical_value,cv_stderr,binom_stderr,base_seed,config_digest\n", 0) == 0);
}

TEST_CASE("reports are identical across thread counts") {
  ExperimentConfig cfg = small_power_config();
  cfg.reps = 300;
  std::string reference;
  for (unsigned threads : {1u, 4u, 8u}) {
    cfg.threads = threads;
    std::ostringstream out;
    write_csv(out, run_power_table(cfg, false));
    if (reference.empty()) reference = out.str();
    CHECK(out.str() == reference);
  }
}

TEST_CASE("critical value at alpha = 0.5 is the median of sup |W|") {
  ExperimentConfig cfg;
  cfg.alpha = 0.5;
  cfg.cv_reps = 20000;
  cfg.cv_grid_n = 2000;
  const QuantileEstimate q = run_critical_value(cfg, false);
  const double median = sup_abs_bm_quantile(0.5);
  CHECK(std::abs(sup_abs_bm_cdf(median) - 0.5) < 1e-12);
  // Discrete grids sit slightly below the continuum sup.
  CHECK(std::abs(q.value - median) < 4.0 * q.std_error + 0.02);
}

TEST_CASE("sequential demo") {
  const TempDir dir("sequential");
  ExperimentConfig cfg;
  cfg.reps = 1000;
  cfg.cv_reps = 10000;
  cfg.output_path = dir.file("trace.csv");
  const SequentialResult null = run_sequential_demo(cfg);
  CHECK(std::abs((1.0 - null.crossing_frequency) - 0.95) < 0.03);

  // Trace audit: step t uses a window ending at t - 1.
  std::istringstream trace(slurp(null.written_path));
  std::string line;
  std::getline(trace, line);
  CHECK(line == "t,u,norm,critical_value,crossed,window_last");
  std::size_t rows = 0;
  const std::size_t k_n = cfg.k_n();
  while (std::getline(trace, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string t, skip, last;
    std::getline(fields, t, ',');
    for (int i = 0; i < 4; ++i) std::getline(fields, skip, ',');
    std::getline(fields, last, ',');
    const std::size_t tt = std::stoul(t);
    CHECK(std::stoul(last) == (tt > k_n ? tt - 1 : 0));
  }
  CHECK(rows == cfg.n);

  cfg.mu = 0.05;
  cfg.reps = 200;
  const SequentialResult alt = run_sequential_demo(cfg, false);
  CHECK(alt.crossing_frequency > 0.99);
  CHECK(alt.first_crossing.has_value());

  cfg.statistics = {StatisticKind::Plain};
  CHECK_THROWS_AS(run_sequential_demo(cfg, false), Error);
}

TEST_CASE("diagnostics on an independent model pass") {
  const TempDir dir("diagnostics");
  ExperimentConfig cfg;
  set_config_value(cfg, "kind", "heteroskedastic_sine");
  set_config_value(cfg, "noise", "gaussian");
  cfg.mc_reps = 2000;
  cfg.max_lag = 6;
  cfg.coupling_reps = 2000;
  cfg.coupling_ladder = {100, 400};
  cfg.diag_n = 400;
  cfg.output_path = dir.file("diag.csv");
  const DiagnosticsResult d = run_diagnostics(cfg);
  CHECK(d.regularity_pass);
  CHECK(d.autocov.pass);
  CHECK(d.coupling_pass);
  CHECK(d.all_pass);
  REQUIRE(d.written_paths.size() == 3);
  for (const std::string& p : d.written_paths) CHECK(fs::exists(p));
}

}  // TEST_SUITE
