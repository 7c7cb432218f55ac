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
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "lsgauss/error.hpp"
#include "lsgauss/gausslim.hpp"
#include "lsgauss/rates.hpp"

using namespace lsg;

namespace {

double exp_sine_var(double u) {
  const double s = 1.2 + std::sin(6.0 * std::numbers::pi * u);
  return s * s;
}

// P(sup |W| <= x) by the reflection principle:
// sum_k (-1)^k [Phi((2k+1)x) - Phi((2k-1)x)].
double reflection_cdf(double x) {
  const boost::math::normal_distribution<double> nd;
  double sum = 0.0;
  for (int k = -40; k <= 40; ++k) {
    const double term = boost::math::cdf(nd, (2 * k + 1) * x) - boost::math::cdf(nd, (2 * k - 1) * x);
    sum += (k % 2 == 0) ? term : -term;
  }
  return sum;
}

double variance(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

TEST_SUITE("gausslim") {

TEST_CASE("covariance curves") {
  const CovarianceCurve c({0.0, 0.5}, {SymMatrix::scalar(1, 1.0), SymMatrix::scalar(1, 3.0)});
  CHECK(c.value(0.0)(0, 0) == 1.0);
  CHECK(c.value(0.49)(0, 0) == 1.0);
  CHECK(c.value(0.5)(0, 0) == 3.0);
  CHECK(c.value(1.0)(0, 0) == 3.0);
  CHECK(c.scaled(2.0).value(0.7)(0, 0) == 6.0);

  const CovarianceCurve s = CovarianceCurve::sampled([](double u) { return SymMatrix::scalar(1, u); }, 5);
  CHECK(s.grid() == std::vector<double>{0, 0.25, 0.5, 0.75, 1});

  CHECK_THROWS_AS(CovarianceCurve({0.0}, {SymMatrix::scalar(1, -1.0)}), Error);
  CHECK_THROWS_AS(CovarianceCurve({0.1}, {SymMatrix::scalar(1, 1.0)}), Error);
  CHECK_THROWS_AS(CovarianceCurve({0.0, 0.0}, {SymMatrix::scalar(1, 1.0), SymMatrix::scalar(1, 1.0)}), Error);
}

TEST_CASE("gaussian sums") {
  const std::size_t n = 200, reps = 10000;
  const std::vector<SymMatrix> zero(n, SymMatrix(1));
  for (double v : gaussian_sum_path(zero, 1).values) CHECK(v == 0.0);

  const std::vector<SymMatrix> id(n, SymMatrix::identity(1));
  std::vector<SymMatrix> es;
  for (std::size_t t = 1; t <= 1000; ++t) es.push_back(SymMatrix::scalar(1, exp_sine_var(double(t) / 1000)));
  std::vector<double> a(reps), b(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    a[r] = gaussian_sum_path(id, 2, r).row(n)[0];
    b[r] = gaussian_sum_path(es, 3, r).row(1000)[0];
  }
  CHECK(std::abs(variance(a) - 1.0) < 0.03);
  CHECK(std::abs(variance(b) - 1.94) < 0.06);
}

TEST_CASE("limit process") {
  const std::size_t reps = 10000, grid = 1000;
  const LimitProcessSimulator std_sim(CovarianceCurve::standard(1), grid);
  const LimitProcessSimulator four_sim(CovarianceCurve::constant(SymMatrix::scalar(1, 4.0)), grid);
  const LimitProcessSimulator es_sim(CovarianceCurve::sampled([](double u) { return SymMatrix::scalar(1, exp_sine_var(u)); }, grid + 1), grid);
  std::vector<double> w1(reps), es1(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    double t1 = 0.0, t4 = 0.0;
    const double s1 = std_sim.sup(5, r, &t1);
    const double s4 = four_sim.sup(5, r, &t4);
    CHECK(s4 == doctest::Approx(2.0 * s1).epsilon(1e-14));
    w1[r] = t1;
    es_sim.sup(6, r, &es1[r]);
  }
  CHECK(std::abs(variance(w1) - 1.0) < 5.0 * std::sqrt(2.0 / reps));
  const boost::math::normal_distribution<double> nd(0.0, std::sqrt(1.94));
  CHECK(ks_one_sample(es1, [&](double x) { return boost::math::cdf(nd, x); }) < 0.02);

  // Stored and streaming paths agree.
  const PartialSumProcess p = limit_process_path(CovarianceCurve::standard(2), 300, 9, 4);
  const LimitProcessSimulator sim2(CovarianceCurve::standard(2), 300);
  CHECK(sim2.sup(9, 4) == doctest::Approx(sup_statistic(p)).epsilon(1e-14));
}

TEST_CASE("discrete gaussian sums and the limit process share their law") {
  const std::size_t n = 500, reps = 10000;
  std::vector<SymMatrix> sig;
  for (std::size_t t = 1; t <= n; ++t) sig.push_back(SymMatrix::scalar(1, exp_sine_var(double(t) / n)));
  const LimitProcessSimulator sim(CovarianceCurve::sampled([](double u) { return SymMatrix::scalar(1, exp_sine_var(u)); }, n + 1), n);
  std::vector<double> a(reps), b(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    a[r] = sup_statistic(gaussian_sum_path(sig, 10, r));
    b[r] = sim.sup(11, r);
  }
  CHECK(ks_two_sample(a, b) < 0.02);
}

TEST_CASE("sup |W| distribution function") {
  CHECK(std::abs(sup_abs_bm_cdf(10.0) - 1.0) < 1e-12);
  CHECK(std::abs(sup_abs_bm_cdf(2.2414) - 0.95) < 5e-4);
  CHECK(sup_abs_bm_cdf(0.1) < 1e-10);
  double prev = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = 0.1 + 4.9 * k / 99.0;
    const double f = sup_abs_bm_cdf(x);
    if (k > 0) CHECK(f > prev);
    prev = f;
  }
  for (double x : {0.5, 1.0, 1.5, 2.0, 2.2414, 3.0, 4.0})
    CHECK(std::abs(sup_abs_bm_cdf(x) - reflection_cdf(x)) < 1e-12);
  const double q = sup_abs_bm_quantile(0.95);
  CHECK(std::abs(reflection_cdf(q) - 0.95) < 1e-12);
  CHECK(std::abs(q - 2.2414) < 5e-4);
  CHECK_THROWS_AS(sup_abs_bm_cdf(0.0), Error);
  CHECK_THROWS_AS(sup_abs_bm_quantile(1.0), Error);
}

TEST_CASE("order statistic convention") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  // ceil(0.95 * 100) = 95th smallest.
  CHECK(quantile_from_sorted(v, 0.05, 1).value == 95.0);
  CHECK(quantile_from_sorted(v, 0.5, 1).value == 50.0);
  CHECK(quantile_from_sorted(v, 0.051, 1).value == 95.0);
  CHECK(quantile_from_sorted(v, 0.05, 1).std_error > 0.0);
}

TEST_CASE("critical values") {
  const std::size_t reps = 4000, grid = 1000;
  const QuantileEstimate s = critical_value(CovarianceCurve::standard(1), 0.05, reps, grid, 12);
  const QuantileEstimate f = critical_value(CovarianceCurve::constant(SymMatrix::scalar(1, 4.0)), 0.05, reps, grid, 12);
  CHECK(f.value == doctest::Approx(2.0 * s.value).epsilon(1e-14));
  CHECK(std::abs(s.value - sup_abs_bm_quantile(0.95)) < 4.0 * s.std_error + 0.03);

  const QuantileEstimate tight = critical_value(CovarianceCurve::standard(1), 0.01, reps, grid, 12);
  const QuantileEstimate loose = critical_value(CovarianceCurve::standard(1), 0.10, reps, grid, 12);
  CHECK(tight.value >= s.value);
  CHECK(s.value >= loose.value);

  const QuantileEstimate threaded = critical_value(CovarianceCurve::standard(1), 0.05, reps, grid, 12, 4);
  CHECK(threaded.value == s.value);
  CHECK(threaded.std_error == s.std_error);

  CHECK_THROWS_AS(critical_value(CovarianceCurve::standard(1), 0.05, 10, grid, 12), Error);
}

TEST_CASE("critical values are stable under grid refinement") {
  const std::size_t reps = 5000;
  const QuantileEstimate a = critical_value(CovarianceCurve::standard(1), 0.05, reps, 5000, 13);
  const QuantileEstimate b = critical_value(CovarianceCurve::standard(1), 0.05, reps, 10000, 13);
  CHECK(std::abs(a.value - b.value) < 2.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("bivariate critical value exceeds the univariate one") {
  const QuantileEstimate one = critical_value(CovarianceCurve::standard(1), 0.05, 2000, 500, 14);
  const QuantileEstimate two = critical_value(CovarianceCurve::standard(2), 0.05, 2000, 500, 14);
  CHECK(two.value > one.value);
}

}  // TEST_SUITE
