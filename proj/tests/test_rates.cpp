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


#include <boost/math/distributions/normal.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "lsgauss/error.hpp"
#include "lsgauss/procgen.hpp"
#include "lsgauss/rates.hpp"

using namespace lsg;

namespace {

using Q = boost::rational<long long>;

// The four branches written out directly, independent of the case logic.
template <class T>
T branch(int c, T q, T b) {
  switch (c) {
    case 1: return (q - T(2)) / (T(6) * q - T(4));
    case 2: return (b - T(1)) / (T(4) * b - T(2));
    case 3: return (b - T(1)) * (q - T(2)) / (T(4) * q * b - T(3) * q - T(2));
    default: return (b - T(1)) * (b - T(1)) / (T(2) * b * b - T(1) - b);
  }
}

// Exponents in n/d of the two competing approximation terms at L = (n/d)^e:
// the block term (L / (n/d))^a and the window term L^{-1/2} or L^{1-beta}.
template <class T>
std::pair<T, T> competing_terms(int c, T q, T b, T e) {
  const T a = (c == 1 || c == 3) ? (q - T(2)) / (T(4) * q) : (b - T(1)) / (T(2) * b);
  const T window = (c <= 2) ? -e / T(2) : e * (T(1) - b);
  return {(e - T(1)) * a, window};
}

}  // namespace

TEST_SUITE("rates") {

TEST_CASE("xi examples on rationals") {
  CHECK(xi(Q(4), Q(2)) == Q(1, 10));
  CHECK(xi_case(Q(4), Q(2)) == XiCase::One);
  CHECK(xi(Q(4), Q(5, 4)) == Q(1, 14));
  CHECK(xi_case(Q(4), Q(5, 4)) == XiCase::Four);
  CHECK(optimal_block_exponent(Q(4), Q(2)) == Q(1, 5));
  CHECK(optimal_block_exponent(Q(4), Q(5, 4)) == Q(2, 7));
  // beta = 2q/(q+2) = 4/3 sits on the boundary between cases 3 and 4.
  CHECK(branch(3, Q(4), Q(4, 3)) == branch(4, Q(4), Q(4, 3)));
  CHECK(xi(Q(4), Q(4, 3)) == branch(4, Q(4), Q(4, 3)));
  CHECK(xi(4.0, 2.0) == doctest::Approx(0.1));
  CHECK(std::string(to_string(XiCase::Three)) == "case3");
}

TEST_CASE("xi boundary continuity for 50 random q") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> uq(2.01, 40.0);
  for (int k = 0; k < 50; ++k) {
    const double q = uq(gen);
    const double b1 = 1.5, b2 = 2.0 * q / (q + 2.0);
    // At beta = 3/2 the smooth and rough branches meet.
    const int hi = b1 > b2 ? 1 : 2, lo = b1 > b2 ? 3 : 4;
    CHECK(std::abs(branch(hi, q, b1) - branch(lo, q, b1)) <= 1e-12);
    // At beta = 2q/(q+2) the moment and dependence branches meet.
    const int m = b2 >= 1.5 ? 1 : 3, d = b2 >= 1.5 ? 2 : 4;
    CHECK(std::abs(branch(m, q, b2) - branch(d, q, b2)) <= 1e-12);
    // Ties go to the case the display writes with >= / <=.
    CHECK(static_cast<int>(xi_case(q, 1.5)) == hi);
  }
}

TEST_CASE("balancing identity for 100 random rational (q, beta)") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<long long> den(1, 12), qnum(1, 200), bnum(1, 36);
  int done = 0;
  while (done < 100) {
    const long long dq = den(gen), db = den(gen);
    const Q q = Q(2) + Q(qnum(gen), dq), b = Q(1) + Q(bnum(gen), db * 12);
    const int c = static_cast<int>(xi_case(q, b));
    const Q e = optimal_block_exponent(q, b);
    const auto [block, window] = competing_terms(c, q, b, e);
    CHECK(block == window);
    CHECK(block == -xi(q, b));
    CHECK(xi(q, b) == branch(c, q, b));
    const auto lib = balancing_exponents(q, b, e);
    CHECK(lib.block_term == block);
    CHECK(lib.window_term == window);
    ++done;
  }
}

TEST_CASE("xi monotone in beta and bounded") {
  for (double q : {2.5, 4.0, 8.0, 20.0}) {
    double prev = 0.0;
    for (double b = 1.05; b <= 3.0 + 1e-12; b += 0.01) {
      const double v = xi(q, b);
      CHECK(v > 0.0);
      CHECK(v <= 0.25);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
  // For large q the case-1 branch (beta above 2q/(q+2), which tends to 2)
  // tends to 1/6; below that boundary case 2 applies.
  for (double b : {2.5, 5.0}) CHECK(std::abs(xi(1e6, b) - 1.0 / 6.0) < 1e-5);
  CHECK(xi_case(1e6, 1.5) == XiCase::Two);
  CHECK(xi(1e6, 1.5) == doctest::Approx(0.125));
  CHECK_THROWS_AS(xi(2.0, 2.0), Error);
  CHECK_THROWS_AS(xi(4.0, 1.0), Error);
  const RateInputs r = RateInputs::make(4.0, 1.25);
  CHECK(r.xi_case == XiCase::Four);
  CHECK_THROWS_AS(RateInputs::make(1.0, 2.0), Error);
}

TEST_CASE("error budget") {
  ErrorBudget b;
  b.lambda = 0.0;
  b.theta = 2.0;
  b.xi_tail = 7.0;
  b.phi = 1.0;
  b.psi = 1.0;
  b.gamma = 1.0;
  b.n = 1000;
  b.m = 10;
  CHECK(error_budget(b).term2 == 0.0);

  ErrorBudget c = b;
  c.n = 4 * b.n;
  CHECK(error_budget(c).term3 / error_budget(b).term3 == doctest::Approx(std::pow(4.0, 1.0 / b.q - 0.5)));

  // Studentized exp-sine setup: Lambda = n^{1/6}, L = 1, so term1 ~ n^{-1/3}.
  auto term1 = [](std::size_t n) {
    ErrorBudget e;
    e.lambda = std::pow(double(n), 1.0 / 6.0);
    e.theta = 1.0;
    e.L = 1.0;
    e.n = n;
    return error_budget(e).term1;
  };
  CHECK(term1(8000) / term1(1000) == doctest::Approx(0.5));

  const BudgetTerms t = error_budget(b);
  CHECK(t.total == doctest::Approx(t.term1 + t.term2 + t.term3 + t.term4));
  b.theta = -1.0;
  CHECK_THROWS_AS(error_budget(b), Error);
}

TEST_CASE("kolmogorov-smirnov") {
  const std::vector<double> a = {1, 3, 5}, b = {2, 4};
  CHECK(ks_two_sample(a, b) == doctest::Approx(1.0 / 3.0));
  const std::vector<double> t1 = {1, 1, 2}, t2 = {1, 2, 2};
  CHECK(ks_two_sample(t1, t2) == doctest::Approx(1.0 / 3.0));
  const std::vector<double> far1 = {1, 2, 3}, far2 = {4, 5, 6};
  CHECK(ks_two_sample(far1, far2) == 1.0);

  // Reference: scipy.stats.ks_2samp on these rounded samples (cross-sample ties included).
  const std::vector<double> x = {0.35, 0.82, 0.33, -1.3, 0.91, 0.45, -0.54, 0.58, 0.36, 0.29, 0.03, 0.55, -0.74,
                                 -0.16, -0.48, 0.6, 0.04, -0.29, -0.78, -0.26, 0.01, -0.28, 1.29, 1.01, -2.71,
                                 -1.89, -0.17, -0.42, 0.21, 0.22, 2.12, -1.11, -0.38, 2.04, 0.65, 0.66, -0.51};
  const std::vector<double> y = {-1.35, 0.47, 0.41, -0.93, -0.38, 0.23, -0.64, 0.2, 0.4, 0.34, 0.89, 1.19,
                                 -0.21, 0.62, -0.52, 1.03, -0.2, 1.18, -0.77, 1.21, 0.28, -0.95, -0.01};
  CHECK(ks_two_sample(x, y) == doctest::Approx(0.09283196239717979).epsilon(1e-12));

  const std::vector<double> u = {0.7, 0.1, 0.4};
  CHECK(ks_one_sample(u, [](double v) { return v; }) == doctest::Approx(0.3));

  // Reference: 1 - scipy.special.kolmogorov(x).
  CHECK(kolmogorov_cdf(0.3) == doctest::Approx(9.305801334513752e-06).epsilon(1e-9));
  CHECK(kolmogorov_cdf(0.5) == doctest::Approx(0.03605475633512489).epsilon(1e-12));
  CHECK(kolmogorov_cdf(0.8) == doctest::Approx(0.45585758842580193).epsilon(1e-12));
  CHECK(kolmogorov_cdf(1.0) == doctest::Approx(0.7300003283226455).epsilon(1e-12));
  CHECK(kolmogorov_cdf(1.36) == doctest::Approx(0.9505141232446221).epsilon(1e-12));
  CHECK(kolmogorov_cdf(2.0) == doctest::Approx(0.9993290747442203).epsilon(1e-12));
  CHECK(kolmogorov_cdf(3.0) == doctest::Approx(0.9999999695400406).epsilon(1e-12));
  // scipy.stats.kstwobign.ppf.
  CHECK(kolmogorov_quantile(0.95) == doctest::Approx(1.3580986393225505).epsilon(1e-10));
  CHECK(kolmogorov_quantile(0.5) == doctest::Approx(0.8275735551899059).epsilon(1e-10));
  CHECK(ks_two_sample_critical(10000, 10000, 0.05) ==
        doctest::Approx(1.3580986393225505 * std::sqrt(2.0 / 10000)).epsilon(1e-9));
}

TEST_CASE("autocovariance decay: geometric model") {
  const GeneratorSpec ar = GeneratorSpec::tv_ar1(1, 0.5, 200, InnovationLaw::standard_gaussian(1));
  AutocovOptions o;
  o.mc_reps = 4000;
  o.max_lag = 12;
  const AutocovReport r = autocov_decay_check(ar, 1000, 2.0, o);
  CHECK(r.pass);
  CHECK(r.slope < -2.0);
  CHECK(r.normalized_sup <= r.bound_constant);
  // Analytic oracle: Cov(X_t, X_{t+h}) = phi^h / (1 - phi^2).
  for (std::size_t h = 0; h <= 5; ++h) {
    const double truth = std::pow(0.5, double(h)) / 0.75;
    CHECK(std::abs(r.trace_norm[h] - truth) <= 5.0 * r.std_error[h]);
  }
}

TEST_CASE("autocovariance decay: independent model") {
  const GeneratorSpec het =
      GeneratorSpec::heteroskedastic_sine(2, 1.2, 1.0, 6.0, InnovationLaw::standard_gaussian(2));
  AutocovOptions o;
  o.mc_reps = 4000;
  o.max_lag = 8;
  const AutocovReport r = autocov_decay_check(het, 1000, 2.0, o);
  CHECK(r.lags_zero);
  CHECK(r.lag0_matches_lrv);
  CHECK(r.pass);
  for (std::size_t h = 1; h < r.lags.size(); ++h) CHECK_FALSE(r.significant[h]);
  std::ostringstream out;
  write_csv(out, r);
  CHECK(out.str().rfind("lag,", 0) == 0);
}

TEST_CASE("coupling diagnostic for an exactly gaussian model") {
  const GeneratorSpec het =
      GeneratorSpec::heteroskedastic_sine(1, 1.2, 1.0, 6.0, InnovationLaw::standard_gaussian(1));
  const std::vector<std::size_t> ladder = {100, 400};
  CouplingOptions o;
  o.reps = 4000;
  const CouplingReport a = coupling_diagnostic(het, ladder, o);
  for (const CouplingRow& row : a.rows) {
    CHECK(row.pass);
    CHECK(row.ks_sup < row.threshold);
  }
  const CouplingReport b = coupling_diagnostic(het, ladder, o);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].ks_sup == b.rows[i].ks_sup);
    CHECK(a.rows[i].ks_terminal == b.rows[i].ks_terminal);
  }
  o.threads = 3;
  const CouplingReport c = coupling_diagnostic(het, ladder, o);
  CHECK(c.rows[1].ks_sup == a.rows[1].ks_sup);
}

}  // TEST_SUITE
