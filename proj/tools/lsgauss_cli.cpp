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

// Command line front end over the C API.
//
// Exit codes: 0 success, 1 config error, 2 diagnostic failure, 3 numeric error.

#include <cinttypes>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsgauss/lsgauss.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiagnostic = 2;
constexpr int kExitNumeric = 3;

int exit_code(lsg_status s) {
  switch (s) {
    case LSG_OK: return kExitOk;
    case LSG_ERR_CONFIG:
    case LSG_ERR_BAD_SPEC: return kExitConfig;
    default: return kExitNumeric;
  }
}

// Thrown out of the subcommand bodies to unwind with a status.
struct Failure {
  lsg_status status;
};

void check(lsg_status s) {
  if (s != LSG_OK) throw Failure{s};
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::vector<std::string> sets;
};

// Per-subcommand overrides keyed by "section.key", in key order.
using Overrides = std::map<std::string, std::string>;

void add_config_flags(CLI::App* sub, Overrides& overrides) {
  for (std::size_t i = 0; i < lsg_config_key_count(); ++i) {
    const std::string key = lsg_config_key(i);
    const std::string bare = key.substr(key.find('.') + 1);
    std::string names = "--" + key;
    // Bare aliases, except where a global flag already covers the field.
    if (bare != "threads" && bare != "output_path" && bare != "base_seed") names += ",--" + bare;
    sub->add_option_function<std::string>(
           names, [&overrides, key](const std::string& v) { overrides[key] = v; }, "config " + key)
        ->group("Config fields");
  }
}

lsg_config* build_config(const Globals& g, const Overrides& overrides) {
  lsg_config* cfg = nullptr;
  check(g.config_path.empty() ? lsg_config_new(&cfg) : lsg_config_load(g.config_path.c_str(), &cfg));
  auto set = [&](const std::string& key, const std::string& value) {
    const lsg_status s = lsg_config_set(cfg, key.c_str(), value.c_str());
    if (s != LSG_OK) {
      lsg_config_free(cfg);
      throw Failure{s};
    }
  };
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      lsg_config_free(cfg);
      throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : overrides) set(key, value);
  if (g.seed) set("harness.base_seed", std::to_string(*g.seed));
  if (g.threads) set("harness.threads", std::to_string(*g.threads));
  if (!g.out.empty()) set("harness.output_path", g.out);
  return cfg;
}

std::string config_get(const lsg_config* cfg, const char* key) {
  std::size_t len = 0;
  check(lsg_config_get(cfg, key, nullptr, 0, &len));
  std::string text(len + 1, '\0');
  check(lsg_config_get(cfg, key, text.data(), text.size(), nullptr));
  text.resize(len);
  return text;
}

// Owns a config for the duration of one subcommand.
struct ConfigHandle {
  lsg_config* cfg;
  ~ConfigHandle() { lsg_config_free(cfg); }
};

const char* stat_name(lsg_statistic s) { return s == LSG_STAT_PLAIN ? "plain" : "studentized"; }

int cmd_power(const Globals& g, const Overrides& o) {
  ConfigHandle h{build_config(g, o)};
  lsg_power_report* report = nullptr;
  check(lsg_run_power(h.cfg, 1, &report));
  std::printf("%-8s %-12s %8s %8s %10s\n", "mu", "statistic", "power", "stderr", "cv");
  for (std::size_t i = 0; i < lsg_power_report_size(report); ++i) {
    lsg_power_row r;
    check(lsg_power_report_row(report, i, &r));
    std::printf("%-8.4g %-12s %8.4f %8.4f %10.5f\n", r.mu, stat_name(r.statistic), r.power,
                r.binom_stderr, r.critical_value);
  }
  std::printf("config digest %016" PRIx64 ", %.1f s, wrote %s\n", lsg_power_report_digest(report),
              lsg_power_report_seconds(report), lsg_power_report_path(report));
  lsg_power_report_free(report);
  return kExitOk;
}

int cmd_critval(const Globals& g, const Overrides& o) {
  ConfigHandle h{build_config(g, o)};
  lsg_quantile q;
  check(lsg_run_critval(h.cfg, 1, &q));
  std::printf("alpha %.4g: critical value %.6f (stderr %.6f, reps %zu, grid %zu, seed %" PRIu64 ")\n",
              q.alpha, q.value, q.std_error, q.reps, q.grid_n, q.seed);
  std::printf("wrote %s\n", q.written_path);
  return kExitOk;
}

int cmd_diagnose(const Globals& g, const Overrides& o) {
  ConfigHandle h{build_config(g, o)};
  lsg_diagnostics d;
  check(lsg_run_diagnostics(h.cfg, 1, &d));
  const char* verdict[] = {"FAIL", "PASS"};
  if (d.super_polynomial)
    std::printf("regularity  %s  super-polynomial decay, theta %.4g\n", verdict[d.regularity_pass], d.theta);
  else
    std::printf("regularity  %s  beta_fit %.3f, theta %.4g\n", verdict[d.regularity_pass], d.beta_fit, d.theta);
  std::printf("autocov     %s  slope %.3f, normalized sup %.4g, bound %.4g%s\n", verdict[d.autocov_pass],
              d.autocov_slope, d.autocov_normalized_sup, d.autocov_bound,
              d.autocov_lags_zero ? ", lags >= 1 zero" : "");
  std::printf("coupling    %s  %zu rungs, last KS %.4f, nonincreasing %s\n", verdict[d.coupling_pass],
              d.coupling_rungs, d.coupling_ks_last, d.coupling_nonincreasing ? "yes" : "no");
  std::printf("wrote %s, %s, %s\n", d.regularity_path, d.autocov_path, d.coupling_path);
  return d.all_pass ? kExitOk : kExitDiagnostic;
}

int cmd_sequential(const Globals& g, const Overrides& o) {
  ConfigHandle h{build_config(g, o)};
  lsg_sequential s;
  check(lsg_run_sequential(h.cfg, 1, &s));
  if (s.crossed)
    std::printf("traced path crosses %.5f at t = %zu\n", s.critical_value, s.first_crossing);
  else
    std::printf("traced path never crosses %.5f\n", s.critical_value);
  std::printf("crossing frequency %.4f over %zu reps\nwrote %s\n", s.crossing_frequency, s.reps,
              s.written_path);
  return kExitOk;
}

int cmd_xi(const Globals& g, const Overrides& o, std::optional<double> q, std::optional<double> beta) {
  ConfigHandle h{build_config(g, o)};
  // Positional values win over the config defaults.
  const double qv = q ? *q : std::stod(config_get(h.cfg, "rates.q"));
  const double bv = beta ? *beta : std::stod(config_get(h.cfg, "rates.beta"));
  double xi = 0.0, block = 0.0;
  int label = 0;
  check(lsg_xi(qv, bv, &xi, &label, &block));
  std::printf("q %.17g beta %.17g\nxi %.17g\ncase case%d\nL* exponent %.17g\n", qv, bv, xi, label, block);
  return kExitOk;
}

int cmd_simulate(const Globals& g, const Overrides& o, std::uint64_t replication) {
  ConfigHandle h{build_config(g, o)};
  const std::uint64_t seed = std::stoull(config_get(h.cfg, "harness.base_seed"));
  lsg_path* path = nullptr;
  check(lsg_simulate(h.cfg, seed, replication, &path));
  char target[LSG_PATH_MAX];
  const std::string out = g.out.empty() ? "lsgauss_path.csv" : g.out;
  lsg_status s = lsg_fresh_path(out.c_str(), target, sizeof target);
  if (s == LSG_OK) s = lsg_path_write(path, target);
  const std::size_t n = lsg_path_length(path), d = lsg_path_dim(path);
  lsg_path_free(path);
  check(s);
  std::printf("simulated n = %zu, d = %zu (seed %" PRIu64 ", replication %" PRIu64 ")\nwrote %s\n", n, d,
              seed, replication, target);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally stationary partial sums: power study, critical values and diagnostics"};
  app.set_version_flag("--version", std::string(lsg_version()));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--threads", g.threads, "worker threads (0: hardware)");
  app.add_option("--out", g.out, "output path");
  app.add_option("--set", g.sets, "override section.key=value (repeatable)");

  Overrides power_o, critval_o, diag_o, seq_o, xi_o, sim_o;
  auto* power = app.add_subcommand("power", "power table over mu_grid");
  auto* critval = app.add_subcommand("critval", "critical value of the limit process");
  auto* diagnose = app.add_subcommand("diagnose", "regularity, autocovariance and coupling diagnostics");
  auto* sequential = app.add_subcommand("sequential", "sequential monitoring demo");
  auto* xi_cmd = app.add_subcommand("xi", "rate exponent xi(q, beta), its case and the L* exponent");
  auto* simulate = app.add_subcommand("simulate", "dump one simulated path");
  add_config_flags(power, power_o);
  add_config_flags(critval, critval_o);
  add_config_flags(diagnose, diag_o);
  add_config_flags(sequential, seq_o);
  add_config_flags(simulate, sim_o);
  add_config_flags(xi_cmd, xi_o);

  std::optional<double> q, beta;
  xi_cmd->add_option("Q", q, "moment order, > 2");
  xi_cmd->add_option("BETA", beta, "dependence decay exponent, > 1");
  std::uint64_t replication = 0;
  simulate->add_option("--replication", replication, "replication index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*power) return cmd_power(g, power_o);
    if (*critval) return cmd_critval(g, critval_o);
    if (*diagnose) return cmd_diagnose(g, diag_o);
    if (*sequential) return cmd_sequential(g, seq_o);
    if (*xi_cmd) return cmd_xi(g, xi_o, q, beta);
    if (*simulate) return cmd_simulate(g, sim_o, replication);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", lsg_last_error());
    return exit_code(f.status);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
