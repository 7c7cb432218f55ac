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

// Non-stationary data-generating processes X_{t,n} = G_{t,n}(e_t, e_{t-1}, ...)
// driven by iid U(0,1) seeds, plus the regularity functionals that describe
// them (physical dependence measure, local long-run covariance, variation).

#ifndef LSGAUSS_PROCGEN_HPP
#define LSGAUSS_PROCGEN_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lsgauss/matkit.hpp"
#include "lsgauss/rng.hpp"

namespace lsg {

// ---------------------------------------------------------------------------
// Innovation laws. Every law is mean zero with identity covariance and is
// generated coordinate-wise from one uniform per coordinate by inverse CDF.
// ---------------------------------------------------------------------------

class InnovationLaw {
 public:
  enum class Kind { StandardGaussian, CenteredExpOne, CustomIid };

  static InnovationLaw standard_gaussian(std::size_t dim);
  static InnovationLaw centered_exp_one();
  // Quantiles at equally spaced probabilities k / (size - 1), interpolated
  // linearly. The resulting law must be standardized within 1e-6.
  static InnovationLaw custom_iid(std::vector<double> quantile_table);

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  std::string name() const;

  double transform(double uniform) const noexcept;

  // ||eta_1 - eta_1'||_{L_q} for an independent copy eta_1'.
  double difference_norm(double q) const;
  // ||eta_1||_{L_q}.
  double norm(double q) const;

 private:
  InnovationLaw(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  std::size_t dim_;
  std::vector<double> table_;
};

// ---------------------------------------------------------------------------
// Model kinds
// ---------------------------------------------------------------------------

// X_t = sigma(t/n) (Z_t - 1) + mu, sigma(u) = base + amplitude sin(frequency u).
struct ExpSineShift {
  double base = 1.2;
  double amplitude = 1.0;
  double frequency = 6.0 * std::numbers::pi;
  double mu = 0.0;

  double sigma(double u) const noexcept;
};

// X_t = Sigma(t/n)^{1/2} eta_t with independent eta_t.
struct HeteroskedasticIndep {
  std::size_t dim = 1;
  std::function<SymMatrix(double)> sigma;
  // Uniform ellipticity floor of sigma(u).
  double c_true = 0.0;
};

// X_t = sum_{i=0}^{h_coef} a_i(t/n) eta_{t-i}.
struct TvLinear {
  std::size_t dim = 1;
  std::size_t h_coef = 200;
  std::function<Matrix(std::size_t lag, double u)> coef;
  // Per-lag Lipschitz constants in u; filled in by validate() when empty.
  std::vector<double> lipschitz;
};

enum class GeneratorKind { HeteroskedasticIndep, ExpSineShift, TvLinear };

const char* to_string(GeneratorKind kind) noexcept;

struct GeneratorSpec {
  std::variant<HeteroskedasticIndep, ExpSineShift, TvLinear> model;
  InnovationLaw noise = InnovationLaw::centered_exp_one();
  std::string label;

  static GeneratorSpec exp_sine_shift(double mu = 0.0);
  static GeneratorSpec heteroskedastic(std::size_t dim, std::function<SymMatrix(double)> sigma,
                                       InnovationLaw noise, double c_true = 0.0);
  // Sigma(u) = (base + amplitude sin(frequency u))^2 I_d.
  static GeneratorSpec heteroskedastic_sine(std::size_t dim, double base, double amplitude,
                                            double frequency, InnovationLaw noise);
  static GeneratorSpec tv_linear(std::size_t dim, std::size_t h_coef,
                                 std::function<Matrix(std::size_t, double)> coef, InnovationLaw noise);
  // a_i(u) = phi(u)^i I_d with phi(u) = phi + amplitude sin(frequency u).
  static GeneratorSpec tv_ar1(std::size_t dim, double phi, std::size_t h_coef, InnovationLaw noise,
                              double amplitude = 0.0, double frequency = 0.0);

  GeneratorKind kind() const noexcept;
  std::size_t dim() const noexcept;
  // Number of past innovations G depends on beyond the current one.
  std::size_t memory() const noexcept;
  double mean_shift() const noexcept;

  // Throws BadSpec. Completes derived fields (TvLinear Lipschitz constants,
  // HeteroskedasticIndep floor when c_true == 0).
  void validate();
  // Stable digest over kind, parameters and the model curves sampled on a grid.
  std::uint64_t digest() const;
};

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

// Non-owning n x d row-major view of observations; row t-1 holds X_t.
struct PathView {
  std::span<const double> values;
  std::size_t n = 0;
  std::size_t dim = 0;

  std::span<const double> row(std::size_t t) const { return values.subspan((t - 1) * dim, dim); }
};

struct PathMatrix {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  std::uint64_t spec_digest = 0;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  bool centered = true;

  PathView view() const noexcept { return {values, n, dim}; }
  std::span<const double> row(std::size_t t) const { return view().row(t); }
};

// Precomputes the model curves at t/n for one (spec, n) so that repeated
// replications only pay for innovations. Simulation is const and may be
// called concurrently.
class PathSimulator {
 public:
  PathSimulator(GeneratorSpec spec, std::size_t n);

  const GeneratorSpec& spec() const noexcept { return spec_; }
  std::size_t n() const noexcept { return n_; }
  std::uint64_t digest() const noexcept { return digest_; }

  // Centered observations (mean shift excluded), n x d row-major.
  void simulate_centered(std::uint64_t seed, std::uint64_t replication, std::span<double> out) const;
  PathMatrix simulate(std::uint64_t seed, std::uint64_t replication = 0) const;

 private:
  GeneratorSpec spec_;
  std::size_t n_;
  std::uint64_t digest_ = 0;
  std::vector<double> scale_;        // ExpSineShift: sigma(t/n)
  std::vector<SymMatrix> roots_;     // HeteroskedasticIndep: Sigma(t/n)^{1/2}
  std::vector<double> coef_table_;   // TvLinear: a_i(t/n), empty when too large
};

PathMatrix simulate_path(const GeneratorSpec& spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t replication = 0);

// Uniform index of coordinate `coord` at time `t` (t may be <= 0 for burn-in).
std::uint64_t innovation_index(std::int64_t t, std::size_t coord, std::size_t dim) noexcept;

// G_u evaluated on an innovation window: window row i holds eta_{t-i},
// i = 0..memory(). Output excludes the mean shift.
void evaluate_model(const GeneratorSpec& spec, double u, std::span<const double> window,
                    std::span<double> out);

// Every implemented model is linear in its innovation window:
// G_u(window) = sum_{i=0}^{memory()} A_i(u) eta_{-i}. Returns A_0..A_memory.
std::vector<Matrix> linear_coefficients(const GeneratorSpec& spec, double u);

// ---------------------------------------------------------------------------
// Regularity functionals
// ---------------------------------------------------------------------------

SymMatrix local_lrv(const GeneratorSpec& spec, double u);

enum class DependenceMode { Auto, Analytic, MonteCarlo };

// Number of equispaced times in [0, 1] over which delta(h) is maximized.
inline constexpr std::size_t kDependenceGridSize = 32;

struct DependenceOptions {
  DependenceMode mode = DependenceMode::Auto;
  std::size_t mc_reps = 10000;
  std::uint64_t seed = 0x5eed;
};

// delta(h) = max_u || G_u(e_0) - G_u(e_0 with coordinate -h swapped) ||_{L_q}.
double dependence_coeff(const GeneratorSpec& spec, std::size_t h, double q,
                        const DependenceOptions& options = {});

struct RegularityReport {
  std::size_t n = 0;
  double q = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  // ||G_1||_{L_2} + sum_t ||G_t - G_{t-1}||_{L_2}, i.e. theta * gamma.
  double variation = 0.0;
  // The part of `variation` coming from the sum over t.
  double variation_increments = 0.0;
  std::vector<double> delta_curve;  // h = 0..h_report
  std::vector<double> xi_tail;      // L = 0..h_report, extrapolated tail sums
  double beta_fit = 0.0;            // +inf for finite or super-polynomial decay
  bool super_polynomial = false;
};

struct RegularityOptions {
  double beta = 2.0;
  DependenceOptions dependence;
};

RegularityReport regularity_report(const GeneratorSpec& spec, std::size_t n, double q,
                                   std::size_t h_report, const RegularityOptions& options = {});

}  // namespace lsg

#endif  // LSGAUSS_PROCGEN_HPP
