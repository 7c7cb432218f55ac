/* Copyright 2026 The lsgauss Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the lsgauss library. Every call returns an lsg_status; on
 * failure lsg_last_error() holds a message for the calling thread. Handles
 * are opaque and owned by the caller, released with the matching _free. */

#ifndef LSGAUSS_LSGAUSS_H
#define LSGAUSS_LSGAUSS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsg_status {
  LSG_OK = 0,
  LSG_ERR_NONFINITE = 1,
  LSG_ERR_NO_CONVERGENCE = 2,
  LSG_ERR_NOT_PSD = 3,
  LSG_ERR_BELOW_FLOOR = 4,
  LSG_ERR_BAD_SPEC = 5,
  LSG_ERR_BAD_ARGS = 6,
  LSG_ERR_DIM_MISMATCH = 7,
  LSG_ERR_CONFIG = 8,
  LSG_ERR_IO = 9,
  LSG_ERR_INTERNAL = 10
} lsg_status;

typedef enum lsg_statistic { LSG_STAT_PLAIN = 0, LSG_STAT_STUDENTIZED = 1 } lsg_statistic;

typedef struct lsg_config lsg_config;
typedef struct lsg_power_report lsg_power_report;
typedef struct lsg_path lsg_path;

#define LSG_PATH_MAX 4096

const char* lsg_version(void);
const char* lsg_status_name(lsg_status status);
/* Message of the last failed call on this thread; empty after success. */
const char* lsg_last_error(void);

/* Configuration. Keys are "section.key" or a bare key; values use the config
 * file syntax. */
lsg_status lsg_config_new(lsg_config** out);
lsg_status lsg_config_load(const char* path, lsg_config** out);
lsg_status lsg_config_set(lsg_config* cfg, const char* key, const char* value);
/* Current value in config file syntax; buffer semantics as for
 * lsg_config_canonical. */
lsg_status lsg_config_get(const lsg_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
lsg_status lsg_config_validate(const lsg_config* cfg);
lsg_status lsg_config_digest(const lsg_config* cfg, uint64_t* out);
/* Copies the canonical listing into buf (NUL-terminated, truncated to cap)
 * and stores the full length in *needed when non-null. */
lsg_status lsg_config_canonical(const lsg_config* cfg, char* buf, size_t cap, size_t* needed);
void lsg_config_free(lsg_config* cfg);
/* Accepted keys as "section.key"; index past the end returns NULL. */
size_t lsg_config_key_count(void);
const char* lsg_config_key(size_t index);

/* First free name for `path`: itself, or "stem.N.ext" when it exists. */
lsg_status lsg_fresh_path(const char* path, char* buf, size_t cap);

/* Power table. */
typedef struct lsg_power_row {
  double mu;
  lsg_statistic statistic;
  double power;
  size_t reps;
  size_t n;
  double critical_value;
  double cv_stderr;
  double binom_stderr;
  uint64_t base_seed;
} lsg_power_row;

lsg_status lsg_run_power(const lsg_config* cfg, int write, lsg_power_report** out);
size_t lsg_power_report_size(const lsg_power_report* report);
lsg_status lsg_power_report_row(const lsg_power_report* report, size_t index, lsg_power_row* out);
uint64_t lsg_power_report_digest(const lsg_power_report* report);
double lsg_power_report_seconds(const lsg_power_report* report);
/* Empty string when nothing was written. */
const char* lsg_power_report_path(const lsg_power_report* report);
lsg_status lsg_power_report_write(const lsg_power_report* report, const char* path);
void lsg_power_report_free(lsg_power_report* report);

/* Critical value of the configured limit process. */
typedef struct lsg_quantile {
  double alpha;
  double value;
  double std_error;
  size_t reps;
  size_t grid_n;
  uint64_t seed;
  char written_path[LSG_PATH_MAX];
} lsg_quantile;

lsg_status lsg_run_critval(const lsg_config* cfg, int write, lsg_quantile* out);
/* P(sup |W| <= x) on [0, 1] and its inverse, from the series. */
lsg_status lsg_sup_abs_bm_cdf(double x, double* out);
lsg_status lsg_sup_abs_bm_quantile(double p, double* out);

/* Diagnostics: regularity, autocovariance decay and the coupling ladder. */
typedef struct lsg_diagnostics {
  double beta_fit;
  int super_polynomial;
  double theta;
  double autocov_slope;
  double autocov_normalized_sup;
  double autocov_bound;
  int autocov_lags_zero;
  size_t coupling_rungs;
  double coupling_ks_last;
  int coupling_nonincreasing;
  int regularity_pass;
  int autocov_pass;
  int coupling_pass;
  int all_pass;
  char regularity_path[LSG_PATH_MAX];
  char autocov_path[LSG_PATH_MAX];
  char coupling_path[LSG_PATH_MAX];
} lsg_diagnostics;

lsg_status lsg_run_diagnostics(const lsg_config* cfg, int write, lsg_diagnostics* out);

/* Sequential monitoring demo. */
typedef struct lsg_sequential {
  int crossed;            /* on the traced path */
  size_t first_crossing;  /* valid when crossed */
  double critical_value;
  double crossing_frequency;
  size_t reps;
  char written_path[LSG_PATH_MAX];
} lsg_sequential;

lsg_status lsg_run_sequential(const lsg_config* cfg, int write, lsg_sequential* out);

/* Rate exponents. case_label receives 1..4. */
lsg_status lsg_xi(double q, double beta, double* xi, int* case_label, double* block_exponent);

/* One simulated path of the configured model (mean shift included). */
lsg_status lsg_simulate(const lsg_config* cfg, uint64_t seed, uint64_t replication, lsg_path** out);
size_t lsg_path_length(const lsg_path* path);
size_t lsg_path_dim(const lsg_path* path);
/* Row-major n x d values; valid until lsg_path_free. */
const double* lsg_path_data(const lsg_path* path);
/* CSV with columns t, u, x_1..x_d at 17 significant digits. */
lsg_status lsg_path_write(const lsg_path* path, const char* file);
void lsg_path_free(lsg_path* path);

#ifdef __cplusplus
}
#endif

#endif /* LSGAUSS_LSGAUSS_H */
