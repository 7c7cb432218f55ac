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

#include "lsgauss/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lsgauss/error.hpp"

namespace lsg {

namespace {

constexpr int kSweepBudget = 100;
constexpr double kOffDiagonalTolerance = 1e-14;
constexpr double kClipTolerance = 1e-10;

void check_dim(std::size_t d) {
  require(d >= 1 && d <= kMaxDim, ErrorCode::BadArgs,
          "matrix dimension " + std::to_string(d) + " outside [1, 64]");
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFinite, std::string(what) + " has a non-finite entry");
  }
}

// Q diag(f(lambda)) Q^T, filled from the upper triangle so the result is
// exactly symmetric.
SymMatrix spectral_apply(const EigenPair& eig, std::span<const double> mapped) {
  const std::size_t d = eig.values.size();
  SymMatrix out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += eig.vectors(i, k) * mapped[k] * eig.vectors(j, k);
      out.set(i, j, s);
    }
  }
  return out;
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::BelowFloor: return "BelowFloor";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::BadArgs: return "BadArgs";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    require(row.size() == cols_, ErrorCode::DimMismatch, "ragged matrix initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::scaled(double alpha) const {
  Matrix out = *this;
  for (double& v : out.data_) v *= alpha;
  return out;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::DimMismatch, "matrix product shapes");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimMismatch, "matrix sum shapes");
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimMismatch,
          "matrix difference shapes");
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

void multiply(const Matrix& a, std::span<const double> x, std::span<double> y) {
  require(x.size() == a.cols() && y.size() == a.rows(), ErrorCode::DimMismatch,
          "matrix-vector shapes");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
}

// ---------------------------------------------------------------------------
// SymMatrix
// ---------------------------------------------------------------------------

SymMatrix::SymMatrix(std::size_t dim) : m_(dim, dim) {}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(from_dense(Matrix(rows))) {}

SymMatrix SymMatrix::from_dense(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorCode::DimMismatch, "symmetric matrix must be square");
  check_finite(a.data(), "matrix");
  SymMatrix s(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    s.m_(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s.m_(i, j) = v;
      s.m_(j, i) = v;
    }
  }
  return s;
}

SymMatrix SymMatrix::identity(std::size_t d) { return scalar(d, 1.0); }

SymMatrix SymMatrix::scalar(std::size_t d, double value) {
  SymMatrix s(d);
  for (std::size_t i = 0; i < d; ++i) s.set(i, i, value);
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> values) {
  SymMatrix s(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) s.set(i, i, values[i]);
  return s;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  if (!std::isfinite(value)) fail(ErrorCode::NonFinite, "symmetric matrix entry");
  m_(i, j) = value;
  m_(j, i) = value;
}

SymMatrix SymMatrix::scaled(double alpha) const {
  SymMatrix out = *this;
  out.m_ = m_.scaled(alpha);
  check_finite(out.data(), "scaled matrix");
  return out;
}

double SymMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
  return t;
}

double frobenius(const Matrix& a) noexcept {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double frobenius(const SymMatrix& a) noexcept { return frobenius(a.dense()); }

// ---------------------------------------------------------------------------
// Eigen / spectral functions
// ---------------------------------------------------------------------------

EigenPair sym_eigen(const SymMatrix& input) {
  const std::size_t d = input.dim();
  check_dim(d);
  check_finite(input.data(), "matrix");

  Matrix a = input.dense();
  Matrix v = Matrix::identity(d);
  const double scale = frobenius(a);

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  bool converged = scale == 0.0 || off_diagonal() < kOffDiagonalTolerance * scale;
  for (int sweep = 0; sweep < kSweepBudget && !converged; ++sweep) {
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    converged = off_diagonal() < kOffDiagonalTolerance * scale;
  }
  if (!converged) fail(ErrorCode::NoConvergence, "Jacobi sweep budget exhausted");

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenPair out;
  out.values.resize(d);
  out.vectors = Matrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    double sign = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (std::abs(v(i, src)) > 1e-14) {
        sign = v(i, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < d; ++i) out.vectors(i, k) = sign * v(i, src);
  }
  return out;
}

double min_eigenvalue(const SymMatrix& a) {
  if (a.dim() == 1) {
    check_finite(a.data(), "matrix");
    return a(0, 0);
  }
  return sym_eigen(a).values.back();
}

SymMatrix psd_sqrt(const SymMatrix& a) {
  if (a.dim() == 1) {
    check_finite(a.data(), "matrix");
    const double v = a(0, 0);
    if (v < -kClipTolerance * std::abs(v)) fail(ErrorCode::NotPSD, "negative 1x1 matrix");
    return SymMatrix::scalar(1, std::sqrt(std::max(v, 0.0)));
  }
  const EigenPair eig = sym_eigen(a);
  const double scale = frobenius(a);
  std::vector<double> roots(eig.values.size());
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const double lambda = eig.values[k];
    if (lambda < -kClipTolerance * scale) {
      fail(ErrorCode::NotPSD, "eigenvalue " + std::to_string(lambda) + " below clipping tolerance");
    }
    roots[k] = std::sqrt(std::max(lambda, 0.0));
  }
  return spectral_apply(eig, roots);
}

SymMatrix psd_inv_sqrt(const SymMatrix& a, double floor) {
  require(floor > 0.0 && std::isfinite(floor), ErrorCode::BadArgs, "floor must be positive");
  if (a.dim() == 1) {
    check_finite(a.data(), "matrix");
    const double v = a(0, 0);
    if (v < floor - elliptic_slack(floor)) fail(ErrorCode::BelowFloor, "1x1 matrix below floor");
    return SymMatrix::scalar(1, 1.0 / std::sqrt(v));
  }
  const EigenPair eig = sym_eigen(a);
  std::vector<double> mapped(eig.values.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) {
    const double lambda = eig.values[k];
    if (lambda < floor - elliptic_slack(floor)) {
      fail(ErrorCode::BelowFloor, "eigenvalue " + std::to_string(lambda) + " below floor");
    }
    mapped[k] = 1.0 / std::sqrt(lambda);
  }
  return spectral_apply(eig, mapped);
}

double elliptic_slack(double c) noexcept { return 1e-12 * std::max(1.0, c); }

bool is_elliptic(const SymMatrix& a, double c) {
  return min_eigenvalue(a) >= c - elliptic_slack(c);
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

std::vector<double> singular_values(const Matrix& input) {
  check_finite(input.data(), "matrix");
  // Work on the orientation with fewer columns; singular values agree.
  Matrix u = input.cols() <= input.rows() ? input : input.transpose();
  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  if (n == 0) return {};

  for (int sweep = 0; sweep < kSweepBudget; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += u(k, p) * u(k, p);
          beta += u(k, q) * u(k, q);
          gamma += u(k, p) * u(k, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double up = u(k, p);
          const double uq = u(k, q);
          u(k, p) = c * up - s * uq;
          u(k, q) = s * up + c * uq;
        }
      }
    }
    if (!rotated) {
      std::vector<double> sv(n);
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += u(k, j) * u(k, j);
        sv[j] = std::sqrt(s);
      }
      std::sort(sv.begin(), sv.end(), std::greater<>());
      return sv;
    }
  }
  fail(ErrorCode::NoConvergence, "one-sided Jacobi sweep budget exhausted");
}

Norms norms(const Matrix& a) {
  const std::vector<double> sv = singular_values(a);
  Norms out;
  out.frobenius = frobenius(a);
  out.trace_norm = std::accumulate(sv.begin(), sv.end(), 0.0);
  out.op_norm = sv.empty() ? 0.0 : sv.front();
  return out;
}

Norms norms(const SymMatrix& a) {
  // Singular values of a symmetric matrix are |eigenvalues|.
  const EigenPair eig = sym_eigen(a);
  Norms out;
  out.frobenius = frobenius(a);
  for (double lambda : eig.values) {
    out.trace_norm += std::abs(lambda);
    out.op_norm = std::max(out.op_norm, std::abs(lambda));
  }
  return out;
}

}  // namespace lsg
