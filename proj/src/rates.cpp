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

#include "lsgauss/rates.hpp"

#include <algorithm>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "lsgauss/gausslim.hpp"
#include "lsgauss/parallel.hpp"
#include "lsgauss/rng.hpp"
#include "lsgauss/sumproc.hpp"

namespace lsg {

namespace {

// Replications are grouped in fixed blocks so that floating-point reductions
// do not depend on the thread count.
constexpr std::size_t kReduceBlock = 256;

double slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

const char* to_string(XiCase c) noexcept {
  switch (c) {
    case XiCase::One: return "case1";
    case XiCase::Two: return "case2";
    case XiCase::Three: return "case3";
    case XiCase::Four: return "case4";
  }
  return "unknown";
}

RateInputs RateInputs::make(double q, double beta) {
  require(std::isfinite(q) && std::isfinite(beta), ErrorCode::BadArgs, "rate inputs must be finite");
  check_rate_domain(q, beta);
  return {q, beta, lsg::xi_case(q, beta)};
}

BudgetTerms error_budget(const ErrorBudget& b) {
  const double fields[] = {b.lambda, b.theta, b.xi_tail, b.L, b.phi, b.psi, b.gamma};
  for (double v : fields)
    require(std::isfinite(v) && v >= 0.0, ErrorCode::BadArgs, "budget entries must be finite and nonnegative");
  require(b.n >= 1 && b.m >= 1, ErrorCode::BadArgs, "budget needs n >= 1 and m >= 1");
  const double n = static_cast<double>(b.n);
  const double m = static_cast<double>(b.m);
  BudgetTerms t;
  t.term1 = b.lambda * b.theta / std::sqrt(n);
  t.term2 = b.lambda * b.xi_tail;
  t.term3 = std::pow(n, 1.0 / b.q - 0.5) * b.L * b.phi;
  const double inner = b.phi * b.theta * b.gamma + b.psi * b.theta;
  t.term4 = b.phi * b.theta * std::pow(inner, (b.beta - 1.0) / (2.0 * b.beta)) * std::sqrt(std::log(n)) *
            std::pow(m / n, xi(b.q, b.beta));
  t.total = t.term1 + t.term2 + t.term3 + t.term4;
  return t;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

double ks_two_sample(std::span<const double> a_in, std::span<const double> b_in) {
  require(!a_in.empty() && !b_in.empty(), ErrorCode::BadArgs, "KS needs two nonempty samples");
  std::vector<double> a(a_in.begin(), a_in.end()), b(b_in.begin(), b_in.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), ErrorCode::BadArgs, "KS needs a nonempty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  const double pi = std::numbers::pi;
  double sum = 0.0;
  if (x < 1.0) {
    // Theta-function form, fast for small x.
    for (int k = 1; k <= 50; ++k) {
      const double m = 2.0 * k - 1.0;
      const double term = std::exp(-m * m * pi * pi / (8.0 * x * x));
      sum += term;
      if (term < 1e-17) break;
    }
    return std::sqrt(2.0 * pi) / x * sum;
  }
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  return 1.0 - 2.0 * sum;
}

double kolmogorov_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorCode::BadArgs, "probability must be in (0, 1)");
  double lo = 1e-3, hi = 10.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_two_sample_critical(std::size_t n_a, std::size_t n_b, double alpha) {
  require(n_a >= 1 && n_b >= 1, ErrorCode::BadArgs, "sample sizes must be positive");
  const double a = static_cast<double>(n_a), b = static_cast<double>(n_b);
  return kolmogorov_quantile(1.0 - alpha) * std::sqrt((a + b) / (a * b));
}

// ---------------------------------------------------------------------------
// Autocovariance decay
// ---------------------------------------------------------------------------

AutocovReport autocov_decay_check(const GeneratorSpec& spec_in, std::size_t n, double beta,
                                  const AutocovOptions& o) {
  GeneratorSpec spec = spec_in;
  spec.validate();
  require(std::isfinite(beta) && beta > 1.0, ErrorCode::BadArgs, "decay check needs beta > 1");
  require(o.mc_reps >= 100, ErrorCode::BadArgs, "decay check needs at least 100 replications");
  require(o.max_lag >= 2 && 4 * o.max_lag < n, ErrorCode::BadArgs, "max_lag must satisfy 2 <= max_lag < n/4");

  const std::size_t d = spec.dim();
  const std::size_t mem = spec.memory();
  const std::size_t lags = o.max_lag + 1;
  const std::size_t span_len = mem + lags;  // innovations from t - mem to t + max_lag
  const std::vector<std::size_t> anchors = {n / 4, n / 2, (3 * n) / 4};
  const double nd = static_cast<double>(n);

  // coefs[a][h][i]: A_i at time anchors[a] + h.
  std::vector<std::vector<std::vector<Matrix>>> coefs(anchors.size());
  for (std::size_t a = 0; a < anchors.size(); ++a)
    for (std::size_t h = 0; h < lags; ++h)
      coefs[a].push_back(linear_coefficients(spec, static_cast<double>(anchors[a] + h) / nd));

  // Per anchor accumulate sums of X_t, X_{t+h}, X_t X_{t+h}^T and its square.
  const std::size_t per_anchor = lags * d + lags * d * d * 2;
  const std::size_t width = anchors.size() * per_anchor;
  const std::size_t blocks = (o.mc_reps + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(blocks * width, 0.0);

  parallel_for(blocks, o.threads, [&](std::size_t b0, std::size_t b1) {
    std::vector<double> eta(span_len * d), x(lags * d);
    for (std::size_t blk = b0; blk < b1; ++blk) {
      double* acc = partial.data() + blk * width;
      const std::size_t r_end = std::min(o.mc_reps, (blk + 1) * kReduceBlock);
      for (std::size_t r = blk * kReduceBlock; r < r_end; ++r) {
        const CounterRng rng(o.seed, r, StreamPurpose::Innovation);
        for (std::size_t a = 0; a < anchors.size(); ++a) {
          const auto t0 = static_cast<std::int64_t>(anchors[a]) - static_cast<std::int64_t>(mem);
          UniformStream stream(rng, innovation_index(t0, 0, d));
          for (double& e : eta) e = spec.noise.transform(stream.next());
          // X_{t+h} = sum_i A_i eta_{t+h-i}; eta row j holds time t0 + j.
          for (std::size_t h = 0; h < lags; ++h) {
            double* xh = x.data() + h * d;
            std::fill(xh, xh + d, 0.0);
            for (std::size_t i = 0; i <= mem; ++i) {
              const Matrix& A = coefs[a][h][i];
              const double* e = eta.data() + (mem + h - i) * d;
              for (std::size_t p = 0; p < d; ++p)
                for (std::size_t q = 0; q < d; ++q) xh[p] += A(p, q) * e[q];
            }
          }
          double* slot = acc + a * per_anchor;
          for (std::size_t h = 0; h < lags; ++h) {
            for (std::size_t p = 0; p < d; ++p) slot[h * d + p] += x[h * d + p];
            double* cross = slot + lags * d + h * d * d * 2;
            for (std::size_t p = 0; p < d; ++p) {
              for (std::size_t q = 0; q < d; ++q) {
                const double v = x[p] * x[h * d + q];
                cross[2 * (p * d + q)] += v;
                cross[2 * (p * d + q) + 1] += v * v;
              }
            }
          }
        }
      }
    }
  });
  std::vector<double> total(width, 0.0);
  for (std::size_t blk = 0; blk < blocks; ++blk)
    for (std::size_t k = 0; k < width; ++k) total[k] += partial[blk * width + k];

  AutocovReport rep;
  rep.n = n;
  rep.beta = beta;
  rep.reps = o.mc_reps;
  rep.anchors = anchors;
  rep.trace_norm.assign(lags, 0.0);
  rep.std_error.assign(lags, 0.0);
  rep.significant.assign(lags, false);
  for (std::size_t h = 0; h < lags; ++h) rep.lags.push_back(h);

  const double reps = static_cast<double>(o.mc_reps);
  const bool independent = mem == 0;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const double* slot = total.data() + a * per_anchor;
    for (std::size_t h = 0; h < lags; ++h) {
      Matrix cov(d, d);
      double se_sq = 0.0;
      const double* cross = slot + lags * d + h * d * d * 2;
      for (std::size_t p = 0; p < d; ++p) {
        for (std::size_t q = 0; q < d; ++q) {
          const double mean_pq = cross[2 * (p * d + q)] / reps;
          const double mean_sq = cross[2 * (p * d + q) + 1] / reps;
          cov(p, q) = mean_pq - (slot[p] / reps) * (slot[h * d + q] / reps);
          se_sq += std::max(0.0, mean_sq - mean_pq * mean_pq) / reps;
        }
      }
      // ||C||_tr <= sqrt(d) ||C||_F bounds the noise in the trace norm.
      const double se = std::sqrt(static_cast<double>(d) * se_sq);
      const double tr = norms(cov).trace_norm;
      if (tr > rep.trace_norm[h]) {
        rep.trace_norm[h] = tr;
        rep.std_error[h] = se;
      }
      if (h == 0 && independent) {
        const SymMatrix lrv = local_lrv(spec, static_cast<double>(anchors[a]) / nd);
        const double diff = frobenius(cov - lrv.dense());
        if (diff > o.significance * std::sqrt(se_sq)) rep.lag0_matches_lrv = false;
      }
    }
  }

  std::vector<double> xs, ys;
  rep.lags_zero = true;
  for (std::size_t h = 0; h < lags; ++h) {
    rep.significant[h] = rep.trace_norm[h] > o.significance * rep.std_error[h];
    const double excess = std::max(0.0, rep.trace_norm[h] - o.significance * rep.std_error[h]);
    rep.normalized_sup = std::max(rep.normalized_sup, excess * std::pow(h + 1.0, beta));
    if (h >= 1 && rep.significant[h]) {
      rep.lags_zero = false;
      xs.push_back(std::log(h + 1.0));
      ys.push_back(std::log(rep.trace_norm[h]));
    }
  }
  rep.slope = xs.size() >= 2 ? slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();

  RegularityOptions reg;
  reg.beta = beta;
  reg.dependence.seed = o.seed;
  rep.theta = regularity_report(spec, n, 2.0, o.max_lag, reg).theta;
  rep.bound_constant = rep.theta * rep.theta * boost::math::zeta(beta);

  const bool slope_ok = std::isnan(rep.slope) || rep.slope <= -beta + o.slope_slack;
  rep.pass = slope_ok && rep.normalized_sup <= rep.bound_constant && rep.lag0_matches_lrv;
  return rep;
}

// ---------------------------------------------------------------------------
// Coupling diagnostic
// ---------------------------------------------------------------------------

CouplingReport coupling_diagnostic(const GeneratorSpec& spec_in, std::span<const std::size_t> ladder,
                                   const CouplingOptions& o) {
  GeneratorSpec spec = spec_in;
  spec.validate();
  require(!ladder.empty(), ErrorCode::BadArgs, "coupling ladder is empty");
  require(o.reps >= 100, ErrorCode::BadArgs, "coupling diagnostic needs at least 100 replications");
  const std::size_t d = spec.dim();

  CouplingReport report;
  std::vector<double> log_n, log_ks;
  for (std::size_t n : ladder) {
    require(n >= 100, ErrorCode::BadArgs, "coupling diagnostic needs n >= 100");
    const PathSimulator sim(spec, n);
    const auto curve = CovarianceCurve::sampled(
        [&spec](double u) { return local_lrv(spec, u); }, n + 1);
    const LimitProcessSimulator gauss(curve, n);

    std::vector<double> sup_x(o.reps), end_x(o.reps), sup_y(o.reps), end_y(o.reps);
    parallel_for(o.reps, o.threads, [&](std::size_t r0, std::size_t r1) {
      std::vector<double> path(n * d);
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      for (std::size_t r = r0; r < r1; ++r) {
        sim.simulate_centered(o.seed, r, path);
        sup_x[r] = sup_partial_sum({path, n, d});
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) s += path[t * d];
        end_x[r] = s * scale;
        sup_y[r] = gauss.sup(o.seed, r, &end_y[r]);
      }
    });

    CouplingRow row;
    row.n = n;
    row.reps = o.reps;
    row.ks_sup = ks_two_sample(sup_x, sup_y);
    if (o.exact_terminal_reference && d == 1) {
      double var = 0.0;
      for (std::size_t t = 1; t <= n; ++t) var += curve.value(static_cast<double>(t) / n)(0, 0);
      const double sd = std::sqrt(var / static_cast<double>(n));
      row.ks_terminal = ks_one_sample(end_x, [sd](double x) { return normal_cdf(x / sd); });
    } else {
      row.ks_terminal = ks_two_sample(end_x, end_y);
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    log_ks.push_back(std::log(std::max(row.ks_terminal, 1e-300)));
    row.slope = log_n.size() >= 2 ? slope(log_n, log_ks) : std::numeric_limits<double>::quiet_NaN();
    row.threshold = 3.0 * ks_two_sample_critical(o.reps, o.reps, o.alpha);
    row.pass = row.ks_sup <= row.threshold && row.ks_terminal <= row.threshold;
    report.rows.push_back(row);
  }
  report.nonincreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].ks_terminal > report.rows[i - 1].ks_terminal) report.nonincreasing = false;
  report.pass = report.nonincreasing;
  for (const CouplingRow& row : report.rows) report.pass = report.pass && row.pass;
  return report;
}

void write_csv(std::ostream& out, const CouplingReport& report) {
  out << "n,reps,ks_sup,ks_terminal,slope,pass\n" << std::setprecision(6);
  for (const CouplingRow& r : report.rows) {
    out << r.n << ',' << r.reps << ',' << r.ks_sup << ',' << r.ks_terminal << ',';
    if (std::isnan(r.slope)) {
      out << "NA";
    } else {
      out << r.slope;
    }
    out << ',' << (r.pass ? 1 : 0) << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing coupling CSV");
}

void write_csv(std::ostream& out, const AutocovReport& report) {
  out << "lag,trace_norm,stderr,significant,normalized,bound\n" << std::setprecision(6);
  for (std::size_t h = 0; h < report.lags.size(); ++h) {
    out << h << ',' << report.trace_norm[h] << ',' << report.std_error[h] << ','
        << (report.significant[h] ? 1 : 0) << ',' << report.trace_norm[h] * std::pow(h + 1.0, report.beta)
        << ',' << report.bound_constant << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing autocovariance CSV");
}

}  // namespace lsg
