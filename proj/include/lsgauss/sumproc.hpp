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

// Partial-sum processes, data-dependent multipliers, the lagged window
// covariance estimator and sup-norm statistics.

#ifndef LSGAUSS_SUMPROC_HPP
#define LSGAUSS_SUMPROC_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "lsgauss/matkit.hpp"
#include "lsgauss/procgen.hpp"

namespace lsg {

// Row k (k = 0..n) holds n^{-1/2} times the sum of the weighted terms up to k.
struct PartialSumProcess {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> values;  // (n + 1) x m row-major
  std::size_t start_index = 1;

  std::span<const double> row(std::size_t k) const { return {values.data() + k * m, m}; }
};

// n multipliers g_t (m x d each). Entry t may only depend on observations
// 1..t-lag, which the builder API enforces by handing over just that prefix.
class MultiplierSequence {
 public:
  // prefix.n == t - lag (clamped at 0); the builder returns g_t.
  using Builder = std::function<Matrix(std::size_t t, PathView prefix)>;

  static MultiplierSequence build(const PathMatrix& path, std::size_t lag, std::size_t m,
                                  const Builder& builder);
  // Deterministic sequence with no data dependence.
  static MultiplierSequence fixed(std::vector<Matrix> entries);

  std::size_t n() const noexcept { return n_; }
  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return d_; }
  std::size_t lag() const noexcept { return lag_; }
  std::uint64_t digest() const noexcept { return digest_; }

  // Row-major m x d block of g_t, t = 1..n.
  std::span<const double> entry(std::size_t t) const { return {data_.data() + (t - 1) * m_ * d_, m_ * d_}; }

 private:
  void finish();

  std::size_t n_ = 0, m_ = 0, d_ = 0, lag_ = 0;
  std::vector<double> data_;
  std::uint64_t digest_ = 0;
};

enum class StatisticKind { Plain, Studentized };

const char* to_string(StatisticKind kind) noexcept;

struct TestOutcome {
  double statistic = 0.0;
  double critical_value = 0.0;
  double alpha = 0.0;
  bool reject = false;
  StatisticKind statistic_kind = StatisticKind::Plain;
};

TestOutcome decide(double statistic, double critical_value, double alpha, StatisticKind kind);

PartialSumProcess partial_sum(const PathMatrix& path);

// Lagged window average (1/k_n) sum_{j=1}^{k_n} X_{t-j} X_{t-j}^T, zero for t <= k_n.
SymMatrix window_cov(const PathMatrix& path, std::size_t t, std::size_t k_n);

// Sum of X X^T over the last k pushed rows, updated in O(d^2) per push.
class RollingWindowCov {
 public:
  RollingWindowCov(std::size_t dim, std::size_t k);

  void push(std::span<const double> x);
  bool full() const noexcept { return count_ >= k_; }
  // Average over the window; zero matrix until k rows have been pushed.
  SymMatrix cov() const;
  // Upper-triangle sums, row-major d x d.
  std::span<const double> sums() const noexcept { return sum_; }

 private:
  std::size_t d_, k_;
  std::size_t count_ = 0;
  std::vector<double> ring_;
  std::vector<double> sum_;
};

// Returns sigma_hat when sigma_hat >= c I (boundary included, relative slack
// 1e-12), otherwise c I. With clip_eigenvalues the eigenvalues are floored at
// c instead; that variant is for exploration only.
SymMatrix ellipticity_project(const SymMatrix& sigma_hat, double c, bool clip_eigenvalues = false);

struct StudentizeOptions {
  std::size_t k_n = 0;
  double c = 0.01;
  bool clip_eigenvalues = false;
};

// Sum over t = k_n+1..n of projected-window^{-1/2} X_t, scaled by n^{-1/2}.
PartialSumProcess studentized_process(const PathMatrix& path, const StudentizeOptions& options);

// The studentizing multipliers as a MultiplierSequence (lag 1, zero for t <= k_n).
MultiplierSequence studentizing_multipliers(const PathMatrix& path, const StudentizeOptions& options);

PartialSumProcess multiplier_partial_sum(const PathMatrix& path, const MultiplierSequence& g);

// max_k ||row k||_2.
double sup_statistic(const PartialSumProcess& p);

// sqrt(sum_t E||g_t - target_t||_F^2) with E over the supplied replications.
double multiplier_error_lambda(std::span<const MultiplierSequence> g, std::span<const Matrix> target);

// Streaming versions of sup_statistic(partial_sum(...)) and
// sup_statistic(studentized_process(...)) for a path whose rows are shifted
// by `shift` in every coordinate. No allocation for d = 1.
double sup_partial_sum(PathView path, double shift = 0.0);
double sup_studentized(PathView path, const StudentizeOptions& options, double shift = 0.0);

// Columns k, u, value_1..value_m at 17 significant digits.
void write_csv(std::ostream& out, const PartialSumProcess& p);

}  // namespace lsg

#endif  // LSGAUSS_SUMPROC_HPP
