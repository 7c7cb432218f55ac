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

#include "lsgauss/gausslim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "lsgauss/error.hpp"
#include "lsgauss/parallel.hpp"
#include "lsgauss/rng.hpp"

namespace lsg {

namespace {

constexpr double kSeriesCutoff = 1e-14;

}  // namespace

// ---------------------------------------------------------------------------
// CovarianceCurve
// ---------------------------------------------------------------------------

CovarianceCurve::CovarianceCurve(std::vector<double> grid, std::vector<SymMatrix> matrices)
    : grid_(std::move(grid)), matrices_(std::move(matrices)) {
  require(!grid_.empty() && grid_.size() == matrices_.size(), ErrorCode::BadArgs,
          "covariance curve needs one matrix per grid point");
  require(grid_.front() == 0.0 && grid_.back() <= 1.0, ErrorCode::BadArgs,
          "covariance curve grid must start at 0 and stay in [0, 1]");
  for (std::size_t k = 1; k < grid_.size(); ++k)
    require(grid_[k] > grid_[k - 1], ErrorCode::BadArgs, "covariance curve grid must be increasing");
  const std::size_t d = matrices_.front().dim();
  for (const SymMatrix& m : matrices_) {
    require(m.dim() == d, ErrorCode::DimMismatch, "covariance curve dimensions differ");
    psd_sqrt(m);  // throws NotPSD
  }
}

CovarianceCurve CovarianceCurve::constant(const SymMatrix& sigma) { return CovarianceCurve({0.0}, {sigma}); }

CovarianceCurve CovarianceCurve::sampled(const std::function<SymMatrix(double)>& f, std::size_t size) {
  require(size >= 2, ErrorCode::BadArgs, "sampled curve needs at least two points");
  std::vector<double> grid(size);
  std::vector<SymMatrix> mats;
  mats.reserve(size);
  for (std::size_t k = 0; k < size; ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(size - 1);
    mats.push_back(f(grid[k]));
  }
  return CovarianceCurve(std::move(grid), std::move(mats));
}

CovarianceCurve CovarianceCurve::from_spec(const GeneratorSpec& spec_in, std::size_t size) {
  GeneratorSpec spec = spec_in;
  spec.validate();
  return sampled([&spec](double u) { return local_lrv(spec, u); }, size);
}

const SymMatrix& CovarianceCurve::value(double u) const {
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), u);
  const std::size_t k = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
  return matrices_[k];
}

CovarianceCurve CovarianceCurve::scaled(double alpha) const {
  std::vector<SymMatrix> mats;
  mats.reserve(matrices_.size());
  for (const SymMatrix& m : matrices_) mats.push_back(m.scaled(alpha));
  return CovarianceCurve(grid_, std::move(mats));
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

PartialSumProcess gaussian_sum_path(std::span<const SymMatrix> sigma_t, std::uint64_t seed,
                                    std::uint64_t replication) {
  const std::size_t n = sigma_t.size();
  require(n >= 1, ErrorCode::BadArgs, "empty covariance sequence");
  const std::size_t d = sigma_t.front().dim();
  PartialSumProcess p{n, d, std::vector<double>((n + 1) * d, 0.0), 1};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  UniformStream stream(CounterRng(seed, replication, StreamPurpose::Gaussian), 0);
  std::vector<double> z(d), y(d), s(d, 0.0);
  for (std::size_t t = 1; t <= n; ++t) {
    const SymMatrix& sig = sigma_t[t - 1];
    require(sig.dim() == d, ErrorCode::DimMismatch, "covariance dimensions differ");
    for (std::size_t c = 0; c < d; ++c) z[c] = inverse_normal_cdf(stream.next());
    multiply(psd_sqrt(sig).dense(), z, y);
    for (std::size_t c = 0; c < d; ++c) {
      s[c] += y[c] * scale;
      p.values[t * d + c] = s[c];
    }
  }
  return p;
}

LimitProcessSimulator::LimitProcessSimulator(const CovarianceCurve& curve, std::size_t grid_n)
    : grid_n_(grid_n), dim_(curve.dim()) {
  require(grid_n >= 100, ErrorCode::BadArgs, "limit process grid_n must be at least 100");
  const double inv_sqrt_grid = 1.0 / std::sqrt(static_cast<double>(grid_n));
  // Consecutive grid points usually share a matrix; reuse its root.
  const SymMatrix* last = nullptr;
  Matrix root;
  for (std::size_t k = 1; k <= grid_n; ++k) {
    const SymMatrix& sig = curve.value(static_cast<double>(k) / static_cast<double>(grid_n));
    if (&sig != last) {
      root = psd_sqrt(sig).dense().scaled(inv_sqrt_grid);
      last = &sig;
    }
    if (dim_ == 1) {
      scale_.push_back(root(0, 0));
    } else {
      roots_.push_back(root);
    }
  }
}

PartialSumProcess LimitProcessSimulator::path(std::uint64_t seed, std::uint64_t replication) const {
  const std::size_t d = dim_;
  PartialSumProcess p{grid_n_, d, std::vector<double>((grid_n_ + 1) * d, 0.0), 1};
  UniformStream stream(CounterRng(seed, replication, StreamPurpose::Gaussian), 0);
  std::vector<double> z(d), y(d), s(d, 0.0);
  for (std::size_t k = 1; k <= grid_n_; ++k) {
    for (std::size_t c = 0; c < d; ++c) z[c] = inverse_normal_cdf(stream.next());
    if (d == 1) {
      y[0] = scale_[k - 1] * z[0];
    } else {
      multiply(roots_[k - 1], z, y);
    }
    for (std::size_t c = 0; c < d; ++c) {
      s[c] += y[c];
      p.values[k * d + c] = s[c];
    }
  }
  return p;
}

double LimitProcessSimulator::sup(std::uint64_t seed, std::uint64_t replication, double* terminal) const {
  UniformStream stream(CounterRng(seed, replication, StreamPurpose::Gaussian), 0);
  if (dim_ == 1) {
    double s = 0.0, best = 0.0;
    for (std::size_t k = 0; k < grid_n_; ++k) {
      s += scale_[k] * inverse_normal_cdf(stream.next());
      best = std::max(best, std::abs(s));
    }
    if (terminal) *terminal = s;
    return best;
  }
  const std::size_t d = dim_;
  std::vector<double> z(d), y(d), s(d, 0.0);
  double best = 0.0;
  for (std::size_t k = 0; k < grid_n_; ++k) {
    for (std::size_t c = 0; c < d; ++c) z[c] = inverse_normal_cdf(stream.next());
    multiply(roots_[k], z, y);
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      s[c] += y[c];
      sq += s[c] * s[c];
    }
    best = std::max(best, std::sqrt(sq));
  }
  if (terminal) *terminal = s[0];
  return best;
}

PartialSumProcess limit_process_path(const CovarianceCurve& curve, std::size_t grid_n, std::uint64_t seed,
                                     std::uint64_t replication) {
  return LimitProcessSimulator(curve, grid_n).path(seed, replication);
}

// ---------------------------------------------------------------------------
// sup |W|
// ---------------------------------------------------------------------------

double sup_abs_bm_cdf(double x) {
  require(std::isfinite(x) && x > 0.0, ErrorCode::BadArgs, "sup_abs_bm_cdf needs x > 0");
  const double pi = std::numbers::pi;
  const double rate = pi * pi / (8.0 * x * x);
  double sum = 0.0;
  for (long k = 0;; ++k) {
    const double m = static_cast<double>(2 * k + 1);
    const double term = std::exp(-rate * m * m) / m;
    sum += (k % 2 == 0) ? term : -term;
    if (term < kSeriesCutoff) break;
  }
  return std::clamp(4.0 / pi * sum, 0.0, 1.0);
}

double sup_abs_bm_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorCode::BadArgs, "probability must be in (0, 1)");
  double lo = 1e-3, hi = 50.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sup_abs_bm_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Critical values
// ---------------------------------------------------------------------------

QuantileEstimate quantile_from_sorted(std::span<const double> sorted, double alpha, std::uint64_t seed) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::BadArgs, "alpha must be in (0, 1)");
  const std::size_t reps = sorted.size();
  require(reps >= 1, ErrorCode::BadArgs, "empty sample");
  const auto position = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(reps)));
  const std::size_t pos = std::clamp<std::size_t>(position, 1, reps);

  // Bootstrap: resample indices into the sorted sample and locate the order
  // statistic through the cumulative counts.
  std::vector<std::uint32_t> counts(reps);
  double mean = 0.0, second = 0.0;
  for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
    std::fill(counts.begin(), counts.end(), 0u);
    UniformStream stream(CounterRng(seed, b, StreamPurpose::Bootstrap), 0);
    for (std::size_t i = 0; i < reps; ++i) {
      const auto idx = std::min(reps - 1, static_cast<std::size_t>(stream.next() * static_cast<double>(reps)));
      ++counts[idx];
    }
    std::size_t cum = 0, i = 0;
    for (; i < reps; ++i) {
      cum += counts[i];
      if (cum >= pos) break;
    }
    const double v = sorted[std::min(i, reps - 1)];
    mean += v;
    second += v * v;
  }
  const double nb = static_cast<double>(kBootstrapResamples);
  mean /= nb;
  const double var = std::max(0.0, (second - nb * mean * mean) / (nb - 1.0));

  QuantileEstimate q;
  q.alpha = alpha;
  q.value = sorted[pos - 1];
  q.std_error = std::sqrt(var);
  q.reps = reps;
  q.seed = seed;
  return q;
}

QuantileEstimate critical_value(const CovarianceCurve& curve, double alpha, std::size_t reps,
                                std::size_t grid_n, std::uint64_t seed, unsigned threads,
                                std::vector<double>* sorted_sups) {
  require(alpha > 0.0 && alpha < 0.5 + 1e-12, ErrorCode::BadArgs, "alpha must be in (0, 0.5]");
  require(reps >= 1000, ErrorCode::BadArgs, "critical value needs at least 1000 replications");
  const LimitProcessSimulator sim(curve, grid_n);
  std::vector<double> sups(reps);
  parallel_for(reps, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) sups[r] = sim.sup(seed, kCriticalValueReplicationBase + r);
  });
  std::sort(sups.begin(), sups.end());
  QuantileEstimate q = quantile_from_sorted(sups, alpha, seed);
  q.grid_n = grid_n;
  if (sorted_sups) *sorted_sups = std::move(sups);
  return q;
}

QuantileEstimate critical_value(const CovarianceCurve& curve, double alpha, std::size_t reps,
                                std::size_t grid_n, std::uint64_t seed, unsigned threads) {
  return critical_value(curve, alpha, reps, grid_n, seed, threads, nullptr);
}

void write_csv(std::ostream& out, std::span<const QuantileEstimate> rows) {
  out << "alpha,value,stderr,reps,grid_n,seed\n" << std::setprecision(6);
  for (const QuantileEstimate& q : rows) {
    out << q.alpha << ',' << q.value << ',' << q.std_error << ',' << q.reps << ',' << q.grid_n << ','
        << q.seed << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing quantile CSV");
}

}  // namespace lsg
