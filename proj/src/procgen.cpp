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

#include "lsgauss/procgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "lsgauss/error.hpp"

namespace lsg {

namespace {

constexpr std::int64_t kTimeOffset = std::int64_t{1} << 20;
constexpr std::size_t kMaxCoefTable = std::size_t{1} << 24;  // doubles
constexpr std::size_t kValidationGrid = 257;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffu;
      h_ *= 0x100000001b3ull;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  void add(const std::string& s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ull;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

double grid_point(std::size_t k, std::size_t size) {
  return static_cast<double>(k) / static_cast<double>(size - 1);
}

void fill_innovations(const InnovationLaw& law, const CounterRng& rng, std::int64_t t_first,
                      std::size_t count, std::span<double> out) {
  const std::size_t d = law.dim();
  UniformStream stream(rng, innovation_index(t_first, 0, d));
  for (std::size_t k = 0; k < count * d; ++k) out[k] = law.transform(stream.next());
}

}  // namespace

const char* to_string(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::HeteroskedasticIndep: return "heteroskedastic_indep";
    case GeneratorKind::ExpSineShift: return "exp_sine_shift";
    case GeneratorKind::TvLinear: return "tv_linear";
  }
  return "unknown";
}

double ExpSineShift::sigma(double u) const noexcept { return base + amplitude * std::sin(frequency * u); }

std::uint64_t innovation_index(std::int64_t t, std::size_t coord, std::size_t dim) noexcept {
  return static_cast<std::uint64_t>(t + kTimeOffset) * dim + coord;
}

// ---------------------------------------------------------------------------
// GeneratorSpec
// ---------------------------------------------------------------------------

GeneratorSpec GeneratorSpec::exp_sine_shift(double mu) {
  GeneratorSpec spec;
  ExpSineShift model;
  model.mu = mu;
  spec.model = model;
  spec.noise = InnovationLaw::centered_exp_one();
  spec.label = "exp_sine_shift";
  return spec;
}

GeneratorSpec GeneratorSpec::heteroskedastic(std::size_t dim, std::function<SymMatrix(double)> sigma,
                                             InnovationLaw noise, double c_true) {
  GeneratorSpec spec;
  spec.model = HeteroskedasticIndep{dim, std::move(sigma), c_true};
  spec.noise = std::move(noise);
  spec.label = "heteroskedastic_indep";
  return spec;
}

GeneratorSpec GeneratorSpec::heteroskedastic_sine(std::size_t dim, double base, double amplitude,
                                                  double frequency, InnovationLaw noise) {
  auto sigma = [dim, base, amplitude, frequency](double u) {
    const double s = base + amplitude * std::sin(frequency * u);
    return SymMatrix::scalar(dim, s * s);
  };
  GeneratorSpec spec = heteroskedastic(dim, sigma, std::move(noise));
  spec.label = "heteroskedastic_sine(" + std::to_string(base) + "," + std::to_string(amplitude) +
               "," + std::to_string(frequency) + ")";
  return spec;
}

GeneratorSpec GeneratorSpec::tv_linear(std::size_t dim, std::size_t h_coef,
                                       std::function<Matrix(std::size_t, double)> coef,
                                       InnovationLaw noise) {
  GeneratorSpec spec;
  spec.model = TvLinear{dim, h_coef, std::move(coef), {}};
  spec.noise = std::move(noise);
  spec.label = "tv_linear";
  return spec;
}

GeneratorSpec GeneratorSpec::tv_ar1(std::size_t dim, double phi, std::size_t h_coef, InnovationLaw noise,
                                    double amplitude, double frequency) {
  auto coef = [dim, phi, amplitude, frequency](std::size_t lag, double u) {
    const double p = phi + amplitude * std::sin(frequency * u);
    return Matrix::identity(dim).scaled(std::pow(p, static_cast<double>(lag)));
  };
  GeneratorSpec spec = tv_linear(dim, h_coef, coef, std::move(noise));
  spec.label = "tv_ar1(" + std::to_string(phi) + "," + std::to_string(amplitude) + "," +
               std::to_string(frequency) + ")";
  return spec;
}

GeneratorKind GeneratorSpec::kind() const noexcept {
  return std::visit(overloaded{
                        [](const HeteroskedasticIndep&) { return GeneratorKind::HeteroskedasticIndep; },
                        [](const ExpSineShift&) { return GeneratorKind::ExpSineShift; },
                        [](const TvLinear&) { return GeneratorKind::TvLinear; },
                    },
                    model);
}

std::size_t GeneratorSpec::dim() const noexcept {
  return std::visit(overloaded{
                        [](const HeteroskedasticIndep& m) { return m.dim; },
                        [](const ExpSineShift&) { return std::size_t{1}; },
                        [](const TvLinear& m) { return m.dim; },
                    },
                    model);
}

std::size_t GeneratorSpec::memory() const noexcept {
  if (const auto* tv = std::get_if<TvLinear>(&model)) return tv->h_coef;
  return 0;
}

double GeneratorSpec::mean_shift() const noexcept {
  if (const auto* es = std::get_if<ExpSineShift>(&model)) return es->mu;
  return 0.0;
}

void GeneratorSpec::validate() {
  require(noise.dim() == dim(), ErrorCode::BadSpec,
          "innovation dimension " + std::to_string(noise.dim()) + " does not match model dimension " +
              std::to_string(dim()));
  std::visit(
      overloaded{
          [](const ExpSineShift& m) {
            require(std::isfinite(m.base) && std::isfinite(m.amplitude) && std::isfinite(m.frequency) &&
                        std::isfinite(m.mu),
                    ErrorCode::BadSpec, "exp_sine_shift parameters must be finite");
            // Minimum of sigma over [0, 1]: endpoints and interior critical points.
            double lowest = std::min(m.sigma(0.0), m.sigma(1.0));
            if (m.frequency != 0.0 && m.amplitude != 0.0) {
              const double f = std::abs(m.frequency);
              const double pi = std::numbers::pi;
              const auto last = static_cast<long long>(std::floor(f / pi - 0.5)) + 1;
              require(last < 100000000, ErrorCode::BadSpec, "exp_sine_shift frequency too large");
              for (long long k = 0; k <= last; ++k) {
                const double u = (0.5 * pi + k * pi) / f;
                if (u <= 1.0) lowest = std::min(lowest, m.sigma(u));
              }
            }
            require(lowest > 0.0, ErrorCode::BadSpec,
                    "sigma(u) must be positive on [0,1] (minimum " + std::to_string(lowest) + ")");
          },
          [](HeteroskedasticIndep& m) {
            require(m.dim >= 1 && m.dim <= kMaxDim, ErrorCode::BadSpec, "dimension outside [1, 64]");
            require(static_cast<bool>(m.sigma), ErrorCode::BadSpec, "sigma curve missing");
            double floor = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < kValidationGrid; ++k) {
              const double u = grid_point(k, kValidationGrid);
              const SymMatrix s = m.sigma(u);
              require(s.dim() == m.dim, ErrorCode::BadSpec, "sigma(u) has the wrong dimension");
              floor = std::min(floor, min_eigenvalue(s));
            }
            if (m.c_true == 0.0) m.c_true = floor;
            require(m.c_true > 0.0, ErrorCode::BadSpec, "sigma curve is not uniformly elliptic");
            for (std::size_t k = 0; k < kValidationGrid; ++k) {
              require(is_elliptic(m.sigma(grid_point(k, kValidationGrid)), m.c_true), ErrorCode::BadSpec,
                      "sigma(u) fails the ellipticity floor c_true");
            }
          },
          [](TvLinear& m) {
            require(m.dim >= 1 && m.dim <= kMaxDim, ErrorCode::BadSpec, "dimension outside [1, 64]");
            require(static_cast<bool>(m.coef), ErrorCode::BadSpec, "coefficient curves missing");
            require(m.h_coef < static_cast<std::size_t>(kTimeOffset / 2), ErrorCode::BadSpec,
                    "h_coef too large");
            const bool fill = m.lipschitz.empty();
            if (fill) m.lipschitz.assign(m.h_coef + 1, 0.0);
            require(m.lipschitz.size() == m.h_coef + 1, ErrorCode::BadSpec,
                    "one Lipschitz constant per lag required");
            const double du = 1.0 / static_cast<double>(kValidationGrid - 1);
            for (std::size_t i = 0; i <= m.h_coef; ++i) {
              Matrix prev = m.coef(i, 0.0);
              require(prev.rows() == m.dim && prev.cols() == m.dim && prev.all_finite(), ErrorCode::BadSpec,
                      "coefficient a_" + std::to_string(i) + " malformed");
              double lip = 0.0;
              for (std::size_t k = 1; k < kValidationGrid; ++k) {
                Matrix cur = m.coef(i, grid_point(k, kValidationGrid));
                require(cur.rows() == m.dim && cur.cols() == m.dim && cur.all_finite(), ErrorCode::BadSpec,
                        "coefficient a_" + std::to_string(i) + " malformed");
                lip = std::max(lip, frobenius(cur - prev) / du);
                prev = std::move(cur);
              }
              if (fill) m.lipschitz[i] = lip;
              require(std::isfinite(m.lipschitz[i]) && m.lipschitz[i] >= 0.0, ErrorCode::BadSpec,
                      "Lipschitz constants must be finite");
            }
          },
      },
      model);
}

std::uint64_t GeneratorSpec::digest() const {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(kind()));
  h.add(static_cast<std::uint64_t>(dim()));
  h.add(noise.name());
  constexpr std::size_t kGrid = 17;
  for (std::size_t k = 0; k < kGrid; ++k) h.add(noise.transform((k + 0.5) / kGrid));
  std::visit(overloaded{
                 [&](const ExpSineShift& m) {
                   h.add(m.base);
                   h.add(m.amplitude);
                   h.add(m.frequency);
                   h.add(m.mu);
                 },
                 [&](const HeteroskedasticIndep& m) {
                   h.add(m.c_true);
                   if (!m.sigma) return;
                   for (std::size_t k = 0; k < kGrid; ++k) {
                     const SymMatrix s = m.sigma(grid_point(k, kGrid));
                     for (double v : s.data()) h.add(v);
                   }
                 },
                 [&](const TvLinear& m) {
                   h.add(static_cast<std::uint64_t>(m.h_coef));
                   if (!m.coef) return;
                   for (std::size_t i = 0; i <= m.h_coef; i += (i < 16 ? 1 : 16)) {
                     for (std::size_t k = 0; k < kGrid; ++k) {
                       const Matrix a = m.coef(i, grid_point(k, kGrid));
                       for (double v : a.data()) h.add(v);
                     }
                   }
                 },
             },
             model);
  return h.value();
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

PathSimulator::PathSimulator(GeneratorSpec spec, std::size_t n) : spec_(std::move(spec)), n_(n) {
  require(n_ >= 1, ErrorCode::BadArgs, "path length must be >= 1");
  spec_.validate();
  digest_ = spec_.digest();
  const double nd = static_cast<double>(n_);
  std::visit(overloaded{
                 [&](const ExpSineShift& m) {
                   scale_.resize(n_);
                   for (std::size_t t = 1; t <= n_; ++t) scale_[t - 1] = m.sigma(static_cast<double>(t) / nd);
                 },
                 [&](const HeteroskedasticIndep& m) {
                   roots_.reserve(n_);
                   for (std::size_t t = 1; t <= n_; ++t) roots_.push_back(psd_sqrt(m.sigma(static_cast<double>(t) / nd)));
                 },
                 [&](const TvLinear& m) {
                   const std::size_t block = (m.h_coef + 1) * m.dim * m.dim;
                   if (block * n_ > kMaxCoefTable) return;
                   coef_table_.resize(block * n_);
                   for (std::size_t t = 1; t <= n_; ++t) {
                     double* dst = coef_table_.data() + (t - 1) * block;
                     for (std::size_t i = 0; i <= m.h_coef; ++i) {
                       const Matrix a = m.coef(i, static_cast<double>(t) / nd);
                       std::copy(a.data().begin(), a.data().end(), dst + i * m.dim * m.dim);
                     }
                   }
                 },
             },
             spec_.model);
}

void PathSimulator::simulate_centered(std::uint64_t seed, std::uint64_t replication,
                                      std::span<double> out) const {
  const std::size_t d = spec_.dim();
  require(out.size() == n_ * d, ErrorCode::DimMismatch, "output buffer must hold n x d values");
  const CounterRng rng(seed, replication, StreamPurpose::Innovation);
  const InnovationLaw& law = spec_.noise;

  std::visit(overloaded{
                 [&](const ExpSineShift&) {
                   UniformStream stream(rng, innovation_index(1, 0, 1));
                   for (std::size_t t = 0; t < n_; ++t) out[t] = scale_[t] * law.transform(stream.next());
                 },
                 [&](const HeteroskedasticIndep&) {
                   std::vector<double> eta(d);
                   UniformStream stream(rng, innovation_index(1, 0, d));
                   for (std::size_t t = 0; t < n_; ++t) {
                     for (std::size_t c = 0; c < d; ++c) eta[c] = law.transform(stream.next());
                     multiply(roots_[t].dense(), eta, out.subspan(t * d, d));
                   }
                 },
                 [&](const TvLinear& m) {
                   const std::size_t h = m.h_coef;
                   // eta row j holds the innovation at time j + 1 - h.
                   std::vector<double> eta((n_ + h) * d);
                   fill_innovations(law, rng, 1 - static_cast<std::int64_t>(h), n_ + h, eta);
                   const std::size_t block = (h + 1) * d * d;
                   for (std::size_t t = 1; t <= n_; ++t) {
                     double* x = out.data() + (t - 1) * d;
                     std::fill(x, x + d, 0.0);
                     for (std::size_t i = 0; i <= h; ++i) {
                       const double* e = eta.data() + (t - 1 + h - i) * d;
                       Matrix fallback;
                       const double* a;
                       if (!coef_table_.empty()) {
                         a = coef_table_.data() + (t - 1) * block + i * d * d;
                       } else {
                         fallback = m.coef(i, static_cast<double>(t) / static_cast<double>(n_));
                         a = fallback.data().data();
                       }
                       for (std::size_t r = 0; r < d; ++r) {
                         double s = 0.0;
                         for (std::size_t c = 0; c < d; ++c) s += a[r * d + c] * e[c];
                         x[r] += s;
                       }
                     }
                   }
                 },
             },
             spec_.model);
}

PathMatrix PathSimulator::simulate(std::uint64_t seed, std::uint64_t replication) const {
  PathMatrix path;
  path.n = n_;
  path.dim = spec_.dim();
  path.values.resize(n_ * path.dim);
  path.spec_digest = digest_;
  path.seed = seed;
  path.replication = replication;
  simulate_centered(seed, replication, path.values);
  const double mu = spec_.mean_shift();
  path.centered = mu == 0.0;
  if (mu != 0.0) {
    for (double& v : path.values) v += mu;
  }
  return path;
}

PathMatrix simulate_path(const GeneratorSpec& spec, std::size_t n, std::uint64_t seed,
                         std::uint64_t replication) {
  return PathSimulator(spec, n).simulate(seed, replication);
}

void evaluate_model(const GeneratorSpec& spec, double u, std::span<const double> window,
                    std::span<double> out) {
  const std::size_t d = spec.dim();
  require(window.size() == (spec.memory() + 1) * d && out.size() == d, ErrorCode::DimMismatch,
          "innovation window shape");
  std::visit(overloaded{
                 [&](const ExpSineShift& m) { out[0] = m.sigma(u) * window[0]; },
                 [&](const HeteroskedasticIndep& m) {
                   multiply(psd_sqrt(m.sigma(u)).dense(), window.first(d), out);
                 },
                 [&](const TvLinear& m) {
                   std::fill(out.begin(), out.end(), 0.0);
                   std::vector<double> tmp(d);
                   for (std::size_t i = 0; i <= m.h_coef; ++i) {
                     multiply(m.coef(i, u), window.subspan(i * d, d), tmp);
                     for (std::size_t r = 0; r < d; ++r) out[r] += tmp[r];
                   }
                 },
             },
             spec.model);
}

// ---------------------------------------------------------------------------
// Regularity functionals
// ---------------------------------------------------------------------------

SymMatrix local_lrv(const GeneratorSpec& spec, double u) {
  require(std::isfinite(u) && u >= 0.0 && u <= 1.0, ErrorCode::BadArgs, "u must lie in [0, 1]");
  return std::visit(overloaded{
                        [&](const ExpSineShift& m) {
                          const double s = m.sigma(u);
                          return SymMatrix::scalar(1, s * s);
                        },
                        [&](const HeteroskedasticIndep& m) {
                          require(static_cast<bool>(m.sigma), ErrorCode::BadSpec, "sigma curve missing");
                          return m.sigma(u);
                        },
                        [&](const TvLinear& m) {
                          require(static_cast<bool>(m.coef), ErrorCode::BadSpec, "coefficient curves missing");
                          // (sum_i a_i)(sum_i a_i)^T with Cov(eta) = I.
                          Matrix total(m.dim, m.dim);
                          for (std::size_t i = 0; i <= m.h_coef; ++i) total = total + m.coef(i, u);
                          return SymMatrix::from_dense(total * total.transpose());
                        },
                    },
                    spec.model);
}

namespace {

bool analytic_available(const GeneratorSpec& spec, std::size_t h, double q) {
  if (h > spec.memory()) return true;
  if (spec.kind() != GeneratorKind::TvLinear && h >= 1) return true;
  return spec.dim() == 1 || q == 2.0;
}

double dependence_analytic(const GeneratorSpec& spec, std::size_t h, double q) {
  if (h > spec.memory()) return 0.0;
  const std::size_t d = spec.dim();
  double best = 0.0;
  for (std::size_t k = 0; k < kDependenceGridSize; ++k) {
    const double u = grid_point(k, kDependenceGridSize);
    double value = 0.0;
    std::visit(overloaded{
                   [&](const ExpSineShift& m) {
                     value = h == 0 ? std::abs(m.sigma(u)) * spec.noise.difference_norm(q) : 0.0;
                   },
                   [&](const HeteroskedasticIndep& m) {
                     if (h != 0) return;
                     const SymMatrix s = m.sigma(u);
                     // Exact for d = 1 or q = 2 (E||S^{1/2}(eta - eta')||^2 = 2 tr S);
                     // otherwise an operator-norm bound.
                     if (d == 1) {
                       value = std::sqrt(s(0, 0)) * spec.noise.difference_norm(q);
                     } else if (q == 2.0) {
                       value = std::sqrt(2.0 * s.trace());
                     } else {
                       value = std::sqrt(norms(s).op_norm) * spec.noise.difference_norm(q);
                     }
                   },
                   [&](const TvLinear& m) {
                     const Matrix a = m.coef(h, u);
                     if (d == 1) {
                       value = std::abs(a(0, 0)) * spec.noise.difference_norm(q);
                     } else if (q == 2.0) {
                       value = std::sqrt(2.0) * frobenius(a);
                     } else {
                       value = norms(a).op_norm * spec.noise.difference_norm(q);
                     }
                   },
               },
               spec.model);
    best = std::max(best, value);
  }
  return best;
}

// Every implemented model is linear in its innovation window:
// G_u(window) = sum_i A_i(u) eta_{-i}. Cache the A_i on the grid once.
std::vector<std::vector<double>> linear_operators(const GeneratorSpec& spec, double u) {
  const std::size_t d = spec.dim();
  std::vector<std::vector<double>> ops;
  std::visit(overloaded{
                 [&](const ExpSineShift& m) { ops.push_back({m.sigma(u)}); },
                 [&](const HeteroskedasticIndep& m) {
                   const SymMatrix root = psd_sqrt(m.sigma(u));
                   ops.emplace_back(root.data().begin(), root.data().end());
                 },
                 [&](const TvLinear& m) {
                   for (std::size_t i = 0; i <= m.h_coef; ++i) {
                     const Matrix a = m.coef(i, u);
                     ops.emplace_back(a.data().begin(), a.data().end());
                   }
                 },
             },
             spec.model);
  for (auto& op : ops) op.resize(d * d);
  return ops;
}

void apply_operators(const std::vector<std::vector<double>>& ops, std::size_t d,
                     std::span<const double> window, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double* a = ops[i].data();
    const double* e = window.data() + i * d;
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += a[r * d + c] * e[c];
      out[r] += s;
    }
  }
}

double dependence_monte_carlo(const GeneratorSpec& spec, std::size_t h, double q, std::size_t reps,
                              std::uint64_t seed) {
  const std::size_t d = spec.dim();
  const std::size_t mem = spec.memory();
  const std::size_t width = (mem + 1) * d;
  std::vector<std::vector<std::vector<double>>> grid_ops;
  grid_ops.reserve(kDependenceGridSize);
  for (std::size_t k = 0; k < kDependenceGridSize; ++k)
    grid_ops.push_back(linear_operators(spec, grid_point(k, kDependenceGridSize)));

  std::vector<double> window(width), swapped(width), a(d), b(d);
  std::vector<double> moment(kDependenceGridSize, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    const CounterRng rng(seed, r, StreamPurpose::Innovation);
    const CounterRng copy(seed, r, StreamPurpose::InnovationCopy);
    // Window row i is the innovation at time -i.
    for (std::size_t i = 0; i <= mem; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        window[i * d + c] =
            spec.noise.transform(rng.uniform(innovation_index(-static_cast<std::int64_t>(i), c, d)));
      }
    }
    swapped = window;
    if (h <= mem) {
      for (std::size_t c = 0; c < d; ++c) {
        swapped[h * d + c] =
            spec.noise.transform(copy.uniform(innovation_index(-static_cast<std::int64_t>(h), c, d)));
      }
    }
    for (std::size_t k = 0; k < kDependenceGridSize; ++k) {
      apply_operators(grid_ops[k], d, window, a);
      apply_operators(grid_ops[k], d, swapped, b);
      double sq = 0.0;
      for (std::size_t c = 0; c < d; ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
      moment[k] += q == 2.0 ? sq : std::pow(sq, 0.5 * q);
    }
  }
  const double best = *std::max_element(moment.begin(), moment.end());
  return std::pow(best / static_cast<double>(reps), 1.0 / q);
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
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

double dependence_coeff(const GeneratorSpec& spec_in, std::size_t h, double q,
                        const DependenceOptions& options) {
  require(std::isfinite(q) && q >= 2.0, ErrorCode::BadArgs, "q must be >= 2");
  GeneratorSpec spec = spec_in;
  spec.validate();
  const bool analytic =
      options.mode == DependenceMode::Analytic ||
      (options.mode == DependenceMode::Auto && analytic_available(spec, h, q));
  if (analytic) return dependence_analytic(spec, h, q);
  require(options.mc_reps >= 1000, ErrorCode::BadArgs, "Monte Carlo dependence needs mc_reps >= 1000");
  return dependence_monte_carlo(spec, h, q, options.mc_reps, options.seed);
}

std::vector<Matrix> linear_coefficients(const GeneratorSpec& spec, double u) {
  const std::size_t d = spec.dim();
  std::vector<Matrix> out;
  for (const auto& op : linear_operators(spec, u)) {
    Matrix a(d, d);
    std::copy(op.begin(), op.end(), a.data().begin());
    out.push_back(std::move(a));
  }
  return out;
}

RegularityReport regularity_report(const GeneratorSpec& spec_in, std::size_t n, double q,
                                   std::size_t h_report, const RegularityOptions& options) {
  require(n >= 2, ErrorCode::BadArgs, "regularity report needs n >= 2");
  require(std::isfinite(options.beta) && options.beta > 0.0, ErrorCode::BadArgs, "beta must be positive");
  require(h_report >= 1, ErrorCode::BadArgs, "h_report must be >= 1");
  GeneratorSpec spec = spec_in;
  spec.validate();

  RegularityReport report;
  report.n = n;
  report.q = q;
  report.beta = options.beta;
  report.delta_curve.resize(h_report + 1);
  for (std::size_t h = 0; h <= h_report; ++h) {
    report.delta_curve[h] = dependence_coeff(spec, h, q, options.dependence);
    report.theta = std::max(report.theta, report.delta_curve[h] * std::pow(h + 1.0, options.beta));
  }

  // ||G_1||_{L_2} + sum_{t >= 2} ||G_t - G_{t-1}||_{L_2}; Cov(eta) = I throughout.
  const double nd = static_cast<double>(n);
  double first = 0.0, increments = 0.0;
  std::visit(overloaded{
                 [&](const ExpSineShift& m) {
                   const double unit = spec.noise.norm(2.0);
                   first = std::abs(m.sigma(1.0 / nd)) * unit;
                   for (std::size_t t = 2; t <= n; ++t)
                     increments += std::abs(m.sigma(t / nd) - m.sigma((t - 1) / nd)) * unit;
                 },
                 [&](const HeteroskedasticIndep& m) {
                   SymMatrix prev = psd_sqrt(m.sigma(1.0 / nd));
                   first = frobenius(prev);
                   for (std::size_t t = 2; t <= n; ++t) {
                     SymMatrix cur = psd_sqrt(m.sigma(t / nd));
                     increments += frobenius(cur.dense() - prev.dense());
                     prev = std::move(cur);
                   }
                 },
                 [&](const TvLinear& m) {
                   std::vector<Matrix> prev(m.h_coef + 1);
                   double sq = 0.0;
                   for (std::size_t i = 0; i <= m.h_coef; ++i) {
                     prev[i] = m.coef(i, 1.0 / nd);
                     sq += std::pow(frobenius(prev[i]), 2);
                   }
                   first = std::sqrt(sq);
                   for (std::size_t t = 2; t <= n; ++t) {
                     double diff = 0.0;
                     for (std::size_t i = 0; i <= m.h_coef; ++i) {
                       Matrix cur = m.coef(i, t / nd);
                       diff += std::pow(frobenius(cur - prev[i]), 2);
                       prev[i] = std::move(cur);
                     }
                     increments += std::sqrt(diff);
                   }
                 },
             },
             spec.model);
  report.variation = first + increments;
  report.variation_increments = increments;
  report.gamma = report.theta > 0.0 ? report.variation / report.theta : 0.0;

  // Decay exponent: slope of log delta against log(h + 1).
  std::vector<double> xs, ys;
  for (std::size_t h = 0; h <= h_report; ++h) {
    if (report.delta_curve[h] > 0.0) {
      xs.push_back(std::log(h + 1.0));
      ys.push_back(std::log(report.delta_curve[h]));
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  if (xs.size() < 4 || report.delta_curve[h_report] == 0.0) {
    report.super_polynomial = true;  // finitely many nonzero coefficients
    report.beta_fit = inf;
  } else {
    report.beta_fit = -least_squares_slope(xs, ys);
    const std::size_t half = xs.size() / 2;
    const double head = least_squares_slope(std::span(xs).first(half + 1), std::span(ys).first(half + 1));
    const double tail = least_squares_slope(std::span(xs).subspan(half), std::span(ys).subspan(half));
    // Polynomial decay has a stable log-log slope; faster decay keeps steepening.
    if (tail < 0.0 && tail < 1.5 * head) {
      report.super_polynomial = true;
      report.beta_fit = inf;
    }
  }

  // Xi(L) = sum_{h >= L} delta(h), with the tail beyond h_report extrapolated.
  const double last = report.delta_curve[h_report];
  double tail_mass = 0.0;
  if (last > 0.0) {
    if (report.super_polynomial) {
      const double prev = report.delta_curve[h_report - 1];
      const double ratio = prev > 0.0 ? last / prev : 0.0;
      tail_mass = ratio < 1.0 ? last * ratio / (1.0 - ratio) : inf;
    } else if (report.beta_fit > 1.0) {
      const double b = report.beta_fit;
      tail_mass = last * std::pow(h_report + 1.0, b) * std::pow(h_report + 1.5, 1.0 - b) / (b - 1.0);
    } else {
      tail_mass = inf;
    }
  }
  report.xi_tail.assign(h_report + 1, 0.0);
  double running = tail_mass;
  for (std::size_t l = h_report + 1; l-- > 0;) {
    running += report.delta_curve[l];
    report.xi_tail[l] = running;
  }
  return report;
}

}  // namespace lsg
