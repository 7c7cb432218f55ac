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

// Rate calculus for the Gaussian approximation (xi(q, beta), optimal block
// exponents, the error budget) and empirical diagnostics: autocovariance
// decay and distributional coupling checks.

#ifndef LSGAUSS_RATES_HPP
#define LSGAUSS_RATES_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "lsgauss/error.hpp"
#include "lsgauss/procgen.hpp"

namespace lsg {

// ---------------------------------------------------------------------------
// xi(q, beta)
// ---------------------------------------------------------------------------

// Case 1: beta >= 3/2, beta > 2q/(q+2)    Case 2: beta >= 3/2, beta <= 2q/(q+2)
// Case 3: beta <  3/2, beta > 2q/(q+2)    Case 4: beta <  3/2, beta <= 2q/(q+2)
enum class XiCase { One = 1, Two = 2, Three = 3, Four = 4 };

const char* to_string(XiCase c) noexcept;

// Works for any ordered field T (double, boost::rational, ...).
template <class T>
XiCase xi_case(const T& q, const T& beta) {
  const bool smooth = beta * T(2) >= T(3);
  const bool moments_bind = beta * (q + T(2)) > T(2) * q;
  if (smooth) return moments_bind ? XiCase::One : XiCase::Two;
  return moments_bind ? XiCase::Three : XiCase::Four;
}

template <class T>
void check_rate_domain(const T& q, const T& beta) {
  require(q > T(2) && beta > T(1), ErrorCode::BadArgs, "rate exponents need q > 2 and beta > 1");
}

template <class T>
T xi(const T& q, const T& beta) {
  check_rate_domain(q, beta);
  switch (xi_case(q, beta)) {
    case XiCase::One: return (q - T(2)) / (T(6) * q - T(4));
    case XiCase::Two: return (beta - T(1)) / (T(4) * beta - T(2));
    case XiCase::Three: return (beta - T(1)) * (q - T(2)) / (T(4) * q * beta - T(3) * q - T(2));
    case XiCase::Four: return (beta - T(1)) * (beta - T(1)) / (T(2) * beta * beta - T(1) - beta);
  }
  return T(0);
}

// Exponent e with L* ~ (n/d)^e.
template <class T>
T optimal_block_exponent(const T& q, const T& beta) {
  check_rate_domain(q, beta);
  switch (xi_case(q, beta)) {
    case XiCase::One: return (q - T(2)) / (T(3) * q - T(2));
    case XiCase::Two: return (beta - T(1)) / (T(2) * beta - T(1));
    case XiCase::Three: return (q - T(2)) / (T(4) * q * beta - T(3) * q - T(2));
    case XiCase::Four: return (beta - T(1)) / (T(2) * beta * beta - T(1) - beta);
  }
  return T(0);
}

// The two competing terms of the case's bound, written as powers of x = n/d
// after substituting L = x^e: (L/x)^a and either L^{-1/2} or L^{1-beta}.
template <class T>
struct BalancingExponents {
  T block_term;   // (e - 1) a
  T window_term;  // -e/2 or e (1 - beta)
};

template <class T>
BalancingExponents<T> balancing_exponents(const T& q, const T& beta, const T& e) {
  check_rate_domain(q, beta);
  const XiCase c = xi_case(q, beta);
  const bool moment_exponent = c == XiCase::One || c == XiCase::Three;
  const T a = moment_exponent ? (q - T(2)) / (T(4) * q) : (beta - T(1)) / (T(2) * beta);
  const bool smooth = c == XiCase::One || c == XiCase::Two;
  return {(e - T(1)) * a, smooth ? -e / T(2) : e * (T(1) - beta)};
}

struct RateInputs {
  double q = 4.0;
  double beta = 2.0;
  XiCase xi_case = XiCase::One;

  static RateInputs make(double q, double beta);
};

// ---------------------------------------------------------------------------
// Error budget with every unspecified constant set to 1. An order-of-magnitude
// planning tool, not a bound.
// ---------------------------------------------------------------------------

struct ErrorBudget {
  double lambda = 0.0;
  double theta = 0.0;
  double xi_tail = 0.0;
  double L = 1.0;
  double phi = 0.0;
  double psi = 0.0;
  double gamma = 0.0;
  std::size_t n = 1;
  std::size_t m = 1;
  double q = 4.0;
  double beta = 2.0;
};

struct BudgetTerms {
  double term1 = 0.0;  // n^{-1/2} Lambda Theta
  double term2 = 0.0;  // Lambda Xi
  double term3 = 0.0;  // n^{1/q - 1/2} L Phi
  double term4 = 0.0;  // Phi Theta (Phi Theta Gamma + Psi Theta)^{(beta-1)/(2 beta)} sqrt(log n) (m/n)^xi
  double total = 0.0;
};

BudgetTerms error_budget(const ErrorBudget& b);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

// Exact two-sample statistic sup |F_a - F_b|; inputs need not be sorted.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);
// Limiting law of sqrt(n) D_n.
double kolmogorov_cdf(double x);
double kolmogorov_quantile(double p);
// Asymptotic (1 - alpha) null quantile of the two-sample statistic.
double ks_two_sample_critical(std::size_t n_a, std::size_t n_b, double alpha);

// ---------------------------------------------------------------------------
// Autocovariance decay
// ---------------------------------------------------------------------------

struct AutocovOptions {
  std::size_t mc_reps = 10000;
  std::size_t max_lag = 20;
  std::uint64_t seed = 0x5eed;
  double significance = 5.0;  // in standard errors
  double slope_slack = 0.25;
  unsigned threads = 1;
};

struct AutocovReport {
  std::size_t n = 0;
  double beta = 0.0;
  std::size_t reps = 0;
  std::vector<std::size_t> anchors;
  std::vector<std::size_t> lags;  // 0..max_lag
  // Per lag: max over anchors of the trace-norm estimate and its stderr.
  std::vector<double> trace_norm;
  std::vector<double> std_error;
  std::vector<bool> significant;
  double theta = 0.0;         // from the L_2 dependence measure
  double bound_constant = 0.0;  // Theta^2 zeta(beta)
  double normalized_sup = 0.0;  // max_h (estimate - k se)^+ (h+1)^beta
  double slope = 0.0;           // log-log slope over significant lags >= 1; NaN if none
  bool lags_zero = false;       // no lag >= 1 significant
  bool lag0_matches_lrv = true; // only checked for independent kinds
  bool pass = false;
};

AutocovReport autocov_decay_check(const GeneratorSpec& spec, std::size_t n, double beta,
                                  const AutocovOptions& options = {});

// ---------------------------------------------------------------------------
// Coupling diagnostic
// ---------------------------------------------------------------------------

struct CouplingOptions {
  std::size_t reps = 10000;
  std::uint64_t seed = 0x5eed;
  unsigned threads = 1;
  double alpha = 0.05;
  // For d = 1 the terminal value of the Gaussian sum is exactly normal; compare
  // against that law instead of a second simulated sample.
  bool exact_terminal_reference = true;
};

struct CouplingRow {
  std::size_t n = 0;
  std::size_t reps = 0;
  double ks_sup = 0.0;
  double ks_terminal = 0.0;
  double slope = 0.0;  // log-log slope of ks_terminal against n up to this row; NaN for the first
  double threshold = 0.0;
  bool pass = false;
};

struct CouplingReport {
  std::vector<CouplingRow> rows;
  bool nonincreasing = false;  // ks_terminal along the ladder
  bool pass = false;
};

CouplingReport coupling_diagnostic(const GeneratorSpec& spec, std::span<const std::size_t> ladder,
                                   const CouplingOptions& options = {});

// Columns n, reps, ks_sup, ks_terminal, slope, pass.
void write_csv(std::ostream& out, const CouplingReport& report);
// Columns lag, trace_norm, stderr, significant, normalized, bound.
void write_csv(std::ostream& out, const AutocovReport& report);

}  // namespace lsg

#endif  // LSGAUSS_RATES_HPP
