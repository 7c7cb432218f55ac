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

// Small dense symmetric-matrix kernel. Dimensions are tiny (d <= 64), so
// everything is a plain row-major std::vector and the eigensolver is cyclic
// Jacobi, which is deterministic and accurate to rounding at this size.

#ifndef LSGAUSS_MATKIT_HPP
#define LSGAUSS_MATKIT_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lsg {

inline constexpr std::size_t kMaxDim = 64;

// General m x d matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transpose() const;
  Matrix scaled(double alpha) const;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

// y = A x; y must have A.rows() entries.
void multiply(const Matrix& a, std::span<const double> x, std::span<double> y);

// Symmetric d x d matrix. Symmetry is exact: the constructor from a dense
// matrix averages the two triangles and every mutator writes both entries.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix from_dense(const Matrix& a);
  static SymMatrix identity(std::size_t d);
  static SymMatrix scalar(std::size_t d, double value);
  static SymMatrix diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> data() const noexcept { return m_.data(); }
  const Matrix& dense() const noexcept { return m_; }

  SymMatrix scaled(double alpha) const;
  double trace() const noexcept;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

double frobenius(const Matrix& a) noexcept;
double frobenius(const SymMatrix& a) noexcept;

struct EigenPair {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

EigenPair sym_eigen(const SymMatrix& a);

double min_eigenvalue(const SymMatrix& a);

// Principal square root. Eigenvalues in [-1e-10 ||a||_F, 0) are clipped.
SymMatrix psd_sqrt(const SymMatrix& a);

// Inverse principal square root of a matrix whose spectrum sits above floor.
SymMatrix psd_inv_sqrt(const SymMatrix& a, double floor);

// a - cI is positive semidefinite, with the boundary counted as elliptic.
// Tolerance below c that still counts as elliptic: 1e-12 max(1, c).
double elliptic_slack(double c) noexcept;

bool is_elliptic(const SymMatrix& a, double c);

struct Norms {
  double frobenius = 0.0;
  double trace_norm = 0.0;  // sum of singular values
  double op_norm = 0.0;     // largest singular value
};

Norms norms(const Matrix& a);
Norms norms(const SymMatrix& a);

// Singular values in descending order (one-sided Jacobi).
std::vector<double> singular_values(const Matrix& a);

}  // namespace lsg

#endif  // LSGAUSS_MATKIT_HPP
