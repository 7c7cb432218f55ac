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

#include "lsgauss/lsgauss.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <new>
#include <string>

#include "lsgauss/error.hpp"
#include "lsgauss/gausslim.hpp"
#include "lsgauss/harness.hpp"
#include "lsgauss/procgen.hpp"
#include "lsgauss/rates.hpp"

struct lsg_config {
  lsg::ExperimentConfig cfg;
};

struct lsg_power_report {
  lsg::MonteCarloReport report;
};

struct lsg_path {
  lsg::PathMatrix path;
};

namespace {

thread_local std::string last_error;

lsg_status status_of(lsg::ErrorCode code) {
  switch (code) {
    case lsg::ErrorCode::NonFinite: return LSG_ERR_NONFINITE;
    case lsg::ErrorCode::NoConvergence: return LSG_ERR_NO_CONVERGENCE;
    case lsg::ErrorCode::NotPSD: return LSG_ERR_NOT_PSD;
    case lsg::ErrorCode::BelowFloor: return LSG_ERR_BELOW_FLOOR;
    case lsg::ErrorCode::BadSpec: return LSG_ERR_BAD_SPEC;
    case lsg::ErrorCode::BadArgs: return LSG_ERR_BAD_ARGS;
    case lsg::ErrorCode::DimMismatch: return LSG_ERR_DIM_MISMATCH;
    case lsg::ErrorCode::ConfigError: return LSG_ERR_CONFIG;
    case lsg::ErrorCode::IoError: return LSG_ERR_IO;
  }
  return LSG_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status and the thread-local message.
template <class F>
lsg_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LSG_OK;
  } catch (const lsg::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LSG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LSG_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return LSG_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  lsg::require(p != nullptr, lsg::ErrorCode::BadArgs, std::string(what) + " is null");
}

void copy_text(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size();
  if (buf && cap > 0) {
    const std::size_t k = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), k);
    buf[k] = '\0';
  }
}

void copy_path(const std::string& from, char* to) {
  lsg::require(from.size() < LSG_PATH_MAX, lsg::ErrorCode::IoError, "output path too long: " + from);
  std::memcpy(to, from.c_str(), from.size() + 1);
}

}  // namespace

extern "C" {

const char* lsg_version(void) { return "0.1.0"; }

const char* lsg_status_name(lsg_status status) {
  switch (status) {
    case LSG_OK: return "ok";
    case LSG_ERR_NONFINITE: return lsg::to_string(lsg::ErrorCode::NonFinite);
    case LSG_ERR_NO_CONVERGENCE: return lsg::to_string(lsg::ErrorCode::NoConvergence);
    case LSG_ERR_NOT_PSD: return lsg::to_string(lsg::ErrorCode::NotPSD);
    case LSG_ERR_BELOW_FLOOR: return lsg::to_string(lsg::ErrorCode::BelowFloor);
    case LSG_ERR_BAD_SPEC: return lsg::to_string(lsg::ErrorCode::BadSpec);
    case LSG_ERR_BAD_ARGS: return lsg::to_string(lsg::ErrorCode::BadArgs);
    case LSG_ERR_DIM_MISMATCH: return lsg::to_string(lsg::ErrorCode::DimMismatch);
    case LSG_ERR_CONFIG: return lsg::to_string(lsg::ErrorCode::ConfigError);
    case LSG_ERR_IO: return lsg::to_string(lsg::ErrorCode::IoError);
    case LSG_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* lsg_last_error(void) { return last_error.c_str(); }

lsg_status lsg_config_new(lsg_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new lsg_config();
  });
}

lsg_status lsg_config_load(const char* path, lsg_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto* c = new lsg_config();
    try {
      c->cfg = lsg::load_config(path);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

lsg_status lsg_config_set(lsg_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    lsg::set_config_value(cfg->cfg, key, value);
  });
}

lsg_status lsg_config_validate(const lsg_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.validate();
  });
}

lsg_status lsg_config_digest(const lsg_config* cfg, uint64_t* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = cfg->cfg.digest();
  });
}

lsg_status lsg_config_canonical(const lsg_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "cfg");
    copy_text(cfg->cfg.canonical(), buf, cap, needed);
  });
}

lsg_status lsg_config_get(const lsg_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    copy_text(lsg::get_config_value(cfg->cfg, key), buf, cap, needed);
  });
}

lsg_status lsg_fresh_path(const char* path, char* buf, size_t cap) {
  return guarded([&] {
    need(path, "path");
    need(buf, "buf");
    const std::string fresh = lsg::fresh_output_path(path);
    lsg::require(fresh.size() < cap, lsg::ErrorCode::IoError, "buffer too small for " + fresh);
    copy_text(fresh, buf, cap, nullptr);
  });
}

void lsg_config_free(lsg_config* cfg) { delete cfg; }

size_t lsg_config_key_count(void) { return lsg::config_keys().size(); }

const char* lsg_config_key(size_t index) {
  static const std::vector<std::string> keys = lsg::config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

lsg_status lsg_run_power(const lsg_config* cfg, int write, lsg_power_report** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    auto* r = new lsg_power_report();
    try {
      r->report = lsg::run_power_table(cfg->cfg, write != 0);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

size_t lsg_power_report_size(const lsg_power_report* report) {
  return report ? report->report.rows.size() : 0;
}

lsg_status lsg_power_report_row(const lsg_power_report* report, size_t index, lsg_power_row* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    lsg::require(index < report->report.rows.size(), lsg::ErrorCode::BadArgs, "row index out of range");
    const lsg::PowerRow& r = report->report.rows[index];
    out->mu = r.mu;
    out->statistic = r.statistic == lsg::StatisticKind::Plain ? LSG_STAT_PLAIN : LSG_STAT_STUDENTIZED;
    out->power = r.power;
    out->reps = r.reps;
    out->n = r.n;
    out->critical_value = r.critical_value;
    out->cv_stderr = r.cv_stderr;
    out->binom_stderr = r.binom_stderr;
    out->base_seed = r.base_seed;
  });
}

uint64_t lsg_power_report_digest(const lsg_power_report* report) {
  return report ? report->report.config_digest : 0;
}

double lsg_power_report_seconds(const lsg_power_report* report) {
  return report ? report->report.wall_seconds : 0.0;
}

const char* lsg_power_report_path(const lsg_power_report* report) {
  return report ? report->report.written_path.c_str() : "";
}

lsg_status lsg_power_report_write(const lsg_power_report* report, const char* path) {
  return guarded([&] {
    need(report, "report");
    need(path, "path");
    std::ofstream out(path);
    lsg::require(out.good(), lsg::ErrorCode::IoError, std::string("cannot open ") + path);
    lsg::write_csv(out, report->report);
    lsg::require(out.good(), lsg::ErrorCode::IoError, std::string("write failed: ") + path);
  });
}

void lsg_power_report_free(lsg_power_report* report) { delete report; }

lsg_status lsg_run_critval(const lsg_config* cfg, int write, lsg_quantile* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    std::string path;
    const lsg::QuantileEstimate q = lsg::run_critical_value(cfg->cfg, write != 0, &path);
    out->alpha = q.alpha;
    out->value = q.value;
    out->std_error = q.std_error;
    out->reps = q.reps;
    out->grid_n = q.grid_n;
    out->seed = q.seed;
    copy_path(path, out->written_path);
  });
}

lsg_status lsg_sup_abs_bm_cdf(double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = lsg::sup_abs_bm_cdf(x);
  });
}

lsg_status lsg_sup_abs_bm_quantile(double p, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = lsg::sup_abs_bm_quantile(p);
  });
}

lsg_status lsg_run_diagnostics(const lsg_config* cfg, int write, lsg_diagnostics* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    const lsg::DiagnosticsResult d = lsg::run_diagnostics(cfg->cfg, write != 0);
    *out = lsg_diagnostics{};
    out->beta_fit = d.regularity.beta_fit;
    out->super_polynomial = d.regularity.super_polynomial;
    out->theta = d.regularity.theta;
    out->autocov_slope = d.autocov.slope;
    out->autocov_normalized_sup = d.autocov.normalized_sup;
    out->autocov_bound = d.autocov.bound_constant;
    out->autocov_lags_zero = d.autocov.lags_zero;
    out->coupling_rungs = d.coupling.rows.size();
    out->coupling_ks_last = d.coupling.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                    : d.coupling.rows.back().ks_terminal;
    out->coupling_nonincreasing = d.coupling.nonincreasing;
    out->regularity_pass = d.regularity_pass;
    out->autocov_pass = d.autocov.pass;
    out->coupling_pass = d.coupling_pass;
    out->all_pass = d.all_pass;
    if (d.written_paths.size() == 3) {
      copy_path(d.written_paths[0], out->regularity_path);
      copy_path(d.written_paths[1], out->autocov_path);
      copy_path(d.written_paths[2], out->coupling_path);
    }
  });
}

lsg_status lsg_run_sequential(const lsg_config* cfg, int write, lsg_sequential* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    const lsg::SequentialResult s = lsg::run_sequential_demo(cfg->cfg, write != 0);
    *out = lsg_sequential{};
    out->crossed = s.first_crossing.has_value();
    out->first_crossing = s.first_crossing.value_or(0);
    out->critical_value = s.critical_value;
    out->crossing_frequency = s.crossing_frequency;
    out->reps = s.reps;
    copy_path(s.written_path, out->written_path);
  });
}

lsg_status lsg_xi(double q, double beta, double* xi, int* case_label, double* block_exponent) {
  return guarded([&] {
    const double value = lsg::xi(q, beta);
    if (xi) *xi = value;
    if (case_label) *case_label = static_cast<int>(lsg::xi_case(q, beta));
    if (block_exponent) *block_exponent = lsg::optimal_block_exponent(q, beta);
  });
}

lsg_status lsg_simulate(const lsg_config* cfg, uint64_t seed, uint64_t replication, lsg_path** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    lsg::require(cfg->cfg.n >= 1, lsg::ErrorCode::ConfigError, "n must be positive");
    auto* p = new lsg_path();
    try {
      p->path = lsg::simulate_path(cfg->cfg.make_spec(), cfg->cfg.n, seed, replication);
    } catch (...) {
      delete p;
      throw;
    }
    *out = p;
  });
}

size_t lsg_path_length(const lsg_path* path) { return path ? path->path.n : 0; }

size_t lsg_path_dim(const lsg_path* path) { return path ? path->path.dim : 0; }

const double* lsg_path_data(const lsg_path* path) { return path ? path->path.values.data() : nullptr; }

lsg_status lsg_path_write(const lsg_path* path, const char* file) {
  return guarded([&] {
    need(path, "path");
    need(file, "file");
    std::ofstream out(file);
    lsg::require(out.good(), lsg::ErrorCode::IoError, std::string("cannot open ") + file);
    const lsg::PathMatrix& p = path->path;
    out << "t,u";
    for (std::size_t i = 1; i <= p.dim; ++i) out << ",x_" << i;
    out << '\n' << std::setprecision(17);
    for (std::size_t t = 1; t <= p.n; ++t) {
      out << t << ',' << static_cast<double>(t) / static_cast<double>(p.n);
      for (double v : p.row(t)) out << ',' << v;
      out << '\n';
    }
    lsg::require(out.good(), lsg::ErrorCode::IoError, std::string("write failed: ") + file);
  });
}

void lsg_path_free(lsg_path* path) { delete path; }

}  // extern "C"
