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

// Gaussian comparison objects: independent Gaussian sums with a covariance
// curve, the limit process int_0^u Sigma_v^{1/2} dW_v, and Monte Carlo
// critical values of their sup norms.

#ifndef LSGAUSS_GAUSSLIM_HPP
#define LSGAUSS_GAUSSLIM_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "lsgauss/matkit.hpp"
#include "lsgauss/procgen.hpp"
#include "lsgauss/sumproc.hpp"

namespace lsg {

// Piecewise constant from the left: value(u) is the matrix at the largest
// grid point <= u.
class CovarianceCurve {
 public:
  CovarianceCurve(std::vector<double> grid, std::vector<SymMatrix> matrices);

  static CovarianceCurve constant(const SymMatrix& sigma);
  static CovarianceCurve standard(std::size_t dim) { return constant(SymMatrix::identity(dim)); }
  // Samples f at u_k = k / (size - 1), k = 0..size-1.
  static CovarianceCurve sampled(const std::function<SymMatrix(double)>& f, std::size_t size);
  // Local long-run covariance of a generator sampled on `size` points.
  static CovarianceCurve from_spec(const GeneratorSpec& spec, std::size_t size);

  std::size_t dim() const noexcept { return matrices_.front().dim(); }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<SymMatrix>& matrices() const noexcept { return matrices_; }
  const SymMatrix& value(double u) const;
  CovarianceCurve scaled(double alpha) const;

 private:
  std::vector<double> grid_;
  std::vector<SymMatrix> matrices_;
};

// row k = n^{-1/2} sum_{t<=k} Sigma_t^{1/2} Z_t.
PartialSumProcess gaussian_sum_path(std::span<const SymMatrix> sigma_t, std::uint64_t seed,
                                    std::uint64_t replication = 0);

// Euler scheme on v_k = k / grid_n with increments
// Sigma(v_k)^{1/2} sqrt(1/grid_n) Z_k. The square roots are computed once, so
// one instance serves many replications, concurrently if needed.
class LimitProcessSimulator {
 public:
  LimitProcessSimulator(const CovarianceCurve& curve, std::size_t grid_n);

  std::size_t grid_n() const noexcept { return grid_n_; }
  std::size_t dim() const noexcept { return dim_; }

  PartialSumProcess path(std::uint64_t seed, std::uint64_t replication) const;
  // sup_statistic(path(seed, replication)) without storing the path.
  // `terminal` receives the first coordinate of the last row.
  double sup(std::uint64_t seed, std::uint64_t replication, double* terminal = nullptr) const;

 private:
  std::size_t grid_n_;
  std::size_t dim_;
  std::vector<double> scale_;  // d = 1: sqrt(Sigma(v_k) / grid_n)
  std::vector<Matrix> roots_;  // d > 1: Sigma(v_k)^{1/2} / sqrt(grid_n)
};

PartialSumProcess limit_process_path(const CovarianceCurve& curve, std::size_t grid_n, std::uint64_t seed,
                                     std::uint64_t replication = 0);

// P(sup_{[0,1]} |W| <= x) for standard Brownian motion W.
double sup_abs_bm_cdf(double x);
// Inverse of sup_abs_bm_cdf by bisection.
double sup_abs_bm_quantile(double p);

struct QuantileEstimate {
  double alpha = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  std::size_t grid_n = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kBootstrapResamples = 200;

// (1 - alpha) quantile of the sup norm of the limit process, taken as order
// statistic ceil((1 - alpha) reps). Replication r draws from stream
// (seed, 2^32 + r). Result does not depend on `threads`.
QuantileEstimate critical_value(const CovarianceCurve& curve, double alpha, std::size_t reps,
                                std::size_t grid_n, std::uint64_t seed, unsigned threads = 1);

// Same, but also returns the simulated sups sorted ascending.
QuantileEstimate critical_value(const CovarianceCurve& curve, double alpha, std::size_t reps,
                                std::size_t grid_n, std::uint64_t seed, unsigned threads,
                                std::vector<double>* sorted_sups);

// Order statistic and bootstrap standard error of a sorted sample.
QuantileEstimate quantile_from_sorted(std::span<const double> sorted, double alpha, std::uint64_t seed);

// Columns alpha, value, stderr, reps, grid_n, seed.
void write_csv(std::ostream& out, std::span<const QuantileEstimate> rows);

}  // namespace lsg

#endif  // LSGAUSS_GAUSSLIM_HPP
