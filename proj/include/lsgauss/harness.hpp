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

// Experiment configuration and Monte Carlo drivers: the power study, critical
// values, diagnostics and the sequential monitoring demo.

#ifndef LSGAUSS_HARNESS_HPP
#define LSGAUSS_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lsgauss/gausslim.hpp"
#include "lsgauss/procgen.hpp"
#include "lsgauss/rates.hpp"
#include "lsgauss/sumproc.hpp"

namespace lsg {

enum class ModelKind { ExpSineShift, HeteroskedasticSine, TvAr1 };
enum class NoiseKind { CenteredExp, Gaussian };
enum class CurveKind { Standard, Model };

struct ExperimentConfig {
  // [procgen]
  ModelKind kind = ModelKind::ExpSineShift;
  std::size_t dim = 1;
  double base = 1.2;
  double amplitude = 1.0;
  double frequency = 6.0 * std::numbers::pi;
  double phi = 0.5;
  double phi_amplitude = 0.0;  // tv_ar1: phi(u) = phi + phi_amplitude sin(frequency u)
  std::size_t h_coef = 200;
  NoiseKind noise = NoiseKind::CenteredExp;
  double mu = 0.0;  // shift for single-path runs

  // [sumproc]
  double k_n_exponent = 2.0 / 3.0;
  double c_floor = 0.01;
  bool clip_variant = false;

  // [gausslim]
  std::size_t cv_reps = 100000;
  std::size_t cv_grid_n = 0;  // 0: use n
  CurveKind curve = CurveKind::Standard;

  // [rates]
  double beta = 2.0;
  double q = 4.0;
  std::size_t mc_reps = 10000;
  std::size_t max_lag = 20;
  std::vector<std::size_t> coupling_ladder = {250, 1000, 4000};
  std::size_t coupling_reps = 10000;
  std::size_t diag_n = 1000;
  std::size_t h_report = 20;

  // [harness]
  std::size_t n = 10000;
  std::size_t reps = 10000;
  double alpha = 0.05;
  std::vector<double> mu_grid = {0.0, 0.002, 0.004, 0.006, 0.008, 0.010,
                                 0.012, 0.014, 0.016, 0.018, 0.020};
  std::vector<StatisticKind> statistics = {StatisticKind::Plain, StatisticKind::Studentized};
  std::uint64_t base_seed = 20260101;
  unsigned threads = 1;
  std::string output_path = "lsgauss_report.csv";

  // Throws ConfigError. alpha = 0.5 is only admissible for critical values.
  void validate(bool allow_median = false) const;
  std::size_t k_n() const;
  std::size_t effective_cv_grid() const { return cv_grid_n == 0 ? n : cv_grid_n; }
  GeneratorSpec make_spec() const;
  // Canonical `section.key = value` listing; also the digest input.
  std::string canonical() const;
  std::uint64_t digest() const;
};

// Every accepted key as "section.key", in config file order.
std::vector<std::string> config_keys();

// `key` is "section.key" (or a bare key when unambiguous). Throws ConfigError.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Current value in config file syntax. Throws ConfigError.
std::string get_config_value(const ExperimentConfig& cfg, const std::string& key);
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Returns `path` if it does not exist yet, otherwise the first free
// "stem.N.ext". Never appends to an existing file.
std::string fresh_output_path(const std::string& path);

struct PowerRow {
  double mu = 0.0;
  StatisticKind statistic = StatisticKind::Plain;
  double power = 0.0;
  std::size_t reps = 0;
  std::size_t n = 0;
  double critical_value = 0.0;
  double cv_stderr = 0.0;
  double binom_stderr = 0.0;
  std::uint64_t base_seed = 0;
};

struct MonteCarloReport {
  std::vector<PowerRow> rows;
  std::uint64_t config_digest = 0;
  double wall_seconds = 0.0;  // not serialized
  std::string written_path;

  const PowerRow* find(double mu, StatisticKind kind) const;
};

// Plain statistic: critical value from the true covariance curve. Studentized:
// the Sigma-free critical value of sup |W|. Common random numbers across mu.
MonteCarloReport run_power_table(const ExperimentConfig& cfg, bool write = true);
void write_csv(std::ostream& out, const MonteCarloReport& report);

QuantileEstimate run_critical_value(const ExperimentConfig& cfg, bool write = true,
                                    std::string* written_path = nullptr);

struct DiagnosticsResult {
  RegularityReport regularity;
  AutocovReport autocov;
  CouplingReport coupling;
  bool regularity_pass = false;
  bool coupling_pass = false;  // noise-tolerant ladder check
  bool all_pass = false;
  std::vector<std::string> written_paths;
};

DiagnosticsResult run_diagnostics(const ExperimentConfig& cfg, bool write = true);

struct SequentialResult {
  std::optional<std::size_t> first_crossing;  // on the traced path (replication 0)
  double critical_value = 0.0;
  double crossing_frequency = 0.0;  // over cfg.reps replications
  std::size_t reps = 0;
  std::string written_path;
};

SequentialResult run_sequential_demo(const ExperimentConfig& cfg, bool write = true);

}  // namespace lsg

#endif  // LSGAUSS_HARNESS_HPP
