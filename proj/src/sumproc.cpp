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

#include "lsgauss/sumproc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "lsgauss/error.hpp"

namespace lsg {

namespace {

void check_path(const PathMatrix& path) {
  require(path.values.size() == path.n * path.dim, ErrorCode::DimMismatch, "path storage size");
  for (double v : path.values) require(std::isfinite(v), ErrorCode::NonFinite, "path value not finite");
}

void check_window(std::size_t n, std::size_t k_n) {
  require(k_n >= 1 && k_n < n, ErrorCode::BadArgs,
          "window length k_n=" + std::to_string(k_n) + " must satisfy 1 <= k_n < n=" + std::to_string(n));
}

double row_norm(std::span<const double> row) {
  if (row.size() == 1) return std::abs(row[0]);
  double s = 0.0;
  for (double v : row) s += v * v;
  return std::sqrt(s);
}

// 1 x 1 case of psd_inv_sqrt(ellipticity_project(v, c), c).
double scalar_multiplier(double v, double c, bool clip) {
  const bool elliptic = v >= c - elliptic_slack(c);
  if (elliptic) return 1.0 / std::sqrt(v);
  return 1.0 / std::sqrt(clip ? std::max(v, c) : c);
}

Matrix window_multiplier(const SymMatrix& sigma_hat, const StudentizeOptions& o) {
  return psd_inv_sqrt(ellipticity_project(sigma_hat, o.c, o.clip_eigenvalues), o.c).dense();
}

// Calls visit(t, summand) for t = k_n+1..n where summand is the studentized
// observation at t. Window sums for d = 1 read the path directly.
template <class Visit>
void studentize_scan(PathView path, const StudentizeOptions& o, double shift, Visit&& visit) {
  check_window(path.n, o.k_n);
  require(o.c > 0.0 && std::isfinite(o.c), ErrorCode::BadArgs, "ellipticity floor must be positive");
  const std::size_t n = path.n, d = path.dim, k = o.k_n;
  const double inv_k = 1.0 / static_cast<double>(k);
  if (d == 1) {
    const double* x = path.values.data();
    double sum = 0.0;
    for (std::size_t t = 1; t <= n; ++t) {
      const double xt = x[t - 1] + shift;
      if (t > k) {
        const double z = scalar_multiplier(sum * inv_k, o.c, o.clip_eigenvalues) * xt;
        visit(t, std::span<const double>(&z, 1));
      }
      sum += xt * xt;
      if (t > k) {
        const double old = x[t - 1 - k] + shift;
        sum -= old * old;
      }
    }
    return;
  }
  RollingWindowCov window(d, k);
  std::vector<double> xt(d), z(d);
  for (std::size_t t = 1; t <= n; ++t) {
    const auto row = path.row(t);
    for (std::size_t c = 0; c < d; ++c) xt[c] = row[c] + shift;
    if (t > k) {
      multiply(window_multiplier(window.cov(), o), xt, z);
      visit(t, std::span<const double>(z));
    }
    window.push(xt);
  }
}

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffu;
      h_ *= 0x100000001b3ull;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace

const char* to_string(StatisticKind kind) noexcept {
  return kind == StatisticKind::Plain ? "plain" : "studentized";
}

TestOutcome decide(double statistic, double critical_value, double alpha, StatisticKind kind) {
  return {statistic, critical_value, alpha, statistic > critical_value, kind};
}

// ---------------------------------------------------------------------------
// MultiplierSequence
// ---------------------------------------------------------------------------

MultiplierSequence MultiplierSequence::build(const PathMatrix& path, std::size_t lag, std::size_t m,
                                             const Builder& builder) {
  check_path(path);
  require(lag >= 1, ErrorCode::BadArgs, "multiplier lag must be at least 1");
  MultiplierSequence g;
  g.n_ = path.n;
  g.m_ = m;
  g.d_ = path.dim;
  g.lag_ = lag;
  g.data_.resize(g.n_ * m * g.d_);
  for (std::size_t t = 1; t <= path.n; ++t) {
    const std::size_t visible = t > lag ? t - lag : 0;
    const PathView prefix{std::span<const double>(path.values.data(), visible * path.dim), visible,
                          path.dim};
    const Matrix gt = builder(t, prefix);
    require(gt.rows() == m && gt.cols() == path.dim, ErrorCode::DimMismatch,
            "multiplier at t=" + std::to_string(t) + " has wrong shape");
    std::copy(gt.data().begin(), gt.data().end(), g.data_.begin() + (t - 1) * m * g.d_);
  }
  g.finish();
  return g;
}

MultiplierSequence MultiplierSequence::fixed(std::vector<Matrix> entries) {
  MultiplierSequence g;
  g.n_ = entries.size();
  require(g.n_ >= 1, ErrorCode::BadArgs, "empty multiplier sequence");
  g.m_ = entries.front().rows();
  g.d_ = entries.front().cols();
  g.lag_ = 0;
  g.data_.reserve(g.n_ * g.m_ * g.d_);
  for (const Matrix& e : entries) {
    require(e.rows() == g.m_ && e.cols() == g.d_, ErrorCode::DimMismatch, "multiplier shapes differ");
    g.data_.insert(g.data_.end(), e.data().begin(), e.data().end());
  }
  g.finish();
  return g;
}

void MultiplierSequence::finish() {
  Fnv1a h;
  h.add(n_);
  h.add(m_);
  h.add(d_);
  h.add(lag_);
  for (double v : data_) {
    require(std::isfinite(v), ErrorCode::NonFinite, "multiplier entry not finite");
    h.add(std::bit_cast<std::uint64_t>(v));
  }
  digest_ = h.value();
}

// ---------------------------------------------------------------------------
// Processes
// ---------------------------------------------------------------------------

PartialSumProcess partial_sum(const PathMatrix& path) {
  check_path(path);
  const std::size_t n = path.n, d = path.dim;
  PartialSumProcess p{n, d, std::vector<double>((n + 1) * d, 0.0), 1};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> s(d, 0.0);
  for (std::size_t t = 1; t <= n; ++t) {
    const auto x = path.row(t);
    for (std::size_t c = 0; c < d; ++c) {
      s[c] += x[c];
      p.values[t * d + c] = s[c] * scale;
    }
  }
  return p;
}

SymMatrix window_cov(const PathMatrix& path, std::size_t t, std::size_t k_n) {
  check_window(path.n, k_n);
  require(t >= 1 && t <= path.n, ErrorCode::BadArgs, "time index outside 1..n");
  const std::size_t d = path.dim;
  SymMatrix out(d);
  if (t <= k_n) return out;
  std::vector<double> acc(d * d, 0.0);
  for (std::size_t j = 1; j <= k_n; ++j) {
    const auto x = path.row(t - j);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r; c < d; ++c) acc[r * d + c] += x[r] * x[c];
  }
  const double inv_k = 1.0 / static_cast<double>(k_n);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = r; c < d; ++c) out.set(r, c, acc[r * d + c] * inv_k);
  return out;
}

RollingWindowCov::RollingWindowCov(std::size_t dim, std::size_t k)
    : d_(dim), k_(k), ring_(dim * k, 0.0), sum_(dim * dim, 0.0) {
  require(dim >= 1 && k >= 1, ErrorCode::BadArgs, "rolling window needs dim >= 1 and k >= 1");
}

void RollingWindowCov::push(std::span<const double> x) {
  require(x.size() == d_, ErrorCode::DimMismatch, "rolling window row size");
  double* slot = ring_.data() + (count_ % k_) * d_;
  for (std::size_t r = 0; r < d_; ++r)
    for (std::size_t c = r; c < d_; ++c) sum_[r * d_ + c] += x[r] * x[c];
  if (count_ >= k_) {
    for (std::size_t r = 0; r < d_; ++r)
      for (std::size_t c = r; c < d_; ++c) sum_[r * d_ + c] -= slot[r] * slot[c];
  }
  std::copy(x.begin(), x.end(), slot);
  ++count_;
}

SymMatrix RollingWindowCov::cov() const {
  SymMatrix out(d_);
  if (!full()) return out;
  const double inv_k = 1.0 / static_cast<double>(k_);
  for (std::size_t r = 0; r < d_; ++r)
    for (std::size_t c = r; c < d_; ++c) out.set(r, c, sum_[r * d_ + c] * inv_k);
  return out;
}

SymMatrix ellipticity_project(const SymMatrix& sigma_hat, double c, bool clip_eigenvalues) {
  require(c > 0.0 && std::isfinite(c), ErrorCode::BadArgs, "ellipticity floor must be positive");
  if (is_elliptic(sigma_hat, c)) return sigma_hat;
  const std::size_t d = sigma_hat.dim();
  if (!clip_eigenvalues) return SymMatrix::scalar(d, c);
  const EigenPair eig = sym_eigen(sigma_hat);
  Matrix out(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const double lambda = std::max(eig.values[k], c);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i, j) += lambda * eig.vectors(i, k) * eig.vectors(j, k);
  }
  return SymMatrix::from_dense(out);
}

PartialSumProcess studentized_process(const PathMatrix& path, const StudentizeOptions& options) {
  check_path(path);
  const std::size_t n = path.n, d = path.dim;
  PartialSumProcess p{n, d, std::vector<double>((n + 1) * d, 0.0), options.k_n + 1};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> s(d, 0.0);
  studentize_scan(path.view(), options, 0.0, [&](std::size_t t, std::span<const double> z) {
    for (std::size_t c = 0; c < d; ++c) {
      s[c] += z[c];
      p.values[t * d + c] = s[c] * scale;
    }
  });
  return p;
}

MultiplierSequence studentizing_multipliers(const PathMatrix& path, const StudentizeOptions& options) {
  check_window(path.n, options.k_n);
  const std::size_t d = path.dim, k = options.k_n;
  return MultiplierSequence::build(path, 1, d, [&](std::size_t t, PathView prefix) {
    if (t <= k) return Matrix(d, d);
    // prefix holds X_1..X_{t-1}; the window is its last k rows.
    std::vector<double> acc(d * d, 0.0);
    for (std::size_t j = 1; j <= k; ++j) {
      const auto x = prefix.row(t - j);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r; c < d; ++c) acc[r * d + c] += x[r] * x[c];
    }
    SymMatrix sigma_hat(d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r; c < d; ++c) sigma_hat.set(r, c, acc[r * d + c] / static_cast<double>(k));
    return window_multiplier(sigma_hat, options);
  });
}

PartialSumProcess multiplier_partial_sum(const PathMatrix& path, const MultiplierSequence& g) {
  check_path(path);
  require(g.n() == path.n, ErrorCode::DimMismatch, "multiplier length differs from path length");
  require(g.cols() == path.dim, ErrorCode::DimMismatch, "multiplier columns differ from path dimension");
  const std::size_t n = path.n, d = path.dim, m = g.rows();
  PartialSumProcess p{n, m, std::vector<double>((n + 1) * m, 0.0), 1};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> s(m, 0.0);
  for (std::size_t t = 1; t <= n; ++t) {
    const auto a = g.entry(t);
    const auto x = path.row(t);
    for (std::size_t r = 0; r < m; ++r) {
      double v = 0.0;
      for (std::size_t c = 0; c < d; ++c) v += a[r * d + c] * x[c];
      s[r] += v;
      p.values[t * m + r] = s[r] * scale;
    }
  }
  return p;
}

double sup_statistic(const PartialSumProcess& p) {
  double best = 0.0;
  for (std::size_t k = 0; k <= p.n; ++k) best = std::max(best, row_norm(p.row(k)));
  return best;
}

double multiplier_error_lambda(std::span<const MultiplierSequence> g, std::span<const Matrix> target) {
  require(!g.empty(), ErrorCode::BadArgs, "no replications supplied");
  const std::size_t n = target.size();
  double total = 0.0;
  for (const MultiplierSequence& rep : g) {
    require(rep.n() == n, ErrorCode::DimMismatch, "multiplier length differs from target length");
    for (std::size_t t = 1; t <= n; ++t) {
      const Matrix& tgt = target[t - 1];
      require(tgt.rows() == rep.rows() && tgt.cols() == rep.cols(), ErrorCode::DimMismatch,
              "target shape differs from multiplier shape");
      const auto a = rep.entry(t);
      const auto b = tgt.data();
      for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
    }
  }
  return std::sqrt(total / static_cast<double>(g.size()));
}

double sup_partial_sum(PathView path, double shift) {
  const std::size_t n = path.n, d = path.dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double* x = path.values.data();
  double best = 0.0;
  if (d == 1) {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      s += x[t] + shift;
      best = std::max(best, std::abs(s * scale));
    }
    return best;
  }
  std::vector<double> s(d, 0.0), row(d);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      s[c] += x[t * d + c] + shift;
      row[c] = s[c] * scale;
    }
    best = std::max(best, row_norm(row));
  }
  return best;
}

double sup_studentized(PathView path, const StudentizeOptions& options, double shift) {
  const std::size_t d = path.dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(path.n));
  double best = 0.0;
  if (d == 1) {
    double s = 0.0;
    studentize_scan(path, options, shift, [&](std::size_t, std::span<const double> z) {
      s += z[0];
      best = std::max(best, std::abs(s * scale));
    });
    return best;
  }
  std::vector<double> s(d, 0.0), row(d);
  studentize_scan(path, options, shift, [&](std::size_t, std::span<const double> z) {
    for (std::size_t c = 0; c < d; ++c) {
      s[c] += z[c];
      row[c] = s[c] * scale;
    }
    best = std::max(best, row_norm(row));
  });
  return best;
}

void write_csv(std::ostream& out, const PartialSumProcess& p) {
  out << "k,u";
  for (std::size_t c = 1; c <= p.m; ++c) out << ",value_" << c;
  out << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k <= p.n; ++k) {
    out << k << ',' << static_cast<double>(k) / static_cast<double>(p.n);
    for (double v : p.row(k)) out << ',' << v;
    out << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::IoError, "failed writing process CSV");
}

}  // namespace lsg
