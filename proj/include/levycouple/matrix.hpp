// SPDX-License-Identifier: Apache-2.0
//
// Small dense kernels for the n x n matrices that appear in a coupling
// control. Dimensions are runtime values and expected to stay small (n <= ~16),
// so everything is plain row-major storage without blocking.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levycouple {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  static Matrix zero(std::size_t dim) { return Matrix(dim); }
  static Matrix identity(std::size_t dim);
  // Rows are given outermost; all rows must have the same length as the outer list.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dim_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  double trace() const noexcept;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s) noexcept;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Vector operator*(const Matrix& m, std::span<const double> v);

// y = M^T v without forming the transpose.
Vector transpose_times(const Matrix& m, std::span<const double> v);

// Antisymmetric matrix stored as its strict upper triangle, so
// a(i, j) == -a(j, i) holds exactly for every value of the type.
class AntisymmetricMatrix {
 public:
  AntisymmetricMatrix() = default;
  explicit AntisymmetricMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim - 1) / 2, 0.0) {}

  // Takes the skew part (M - M^T) / 2 of a dense matrix.
  static AntisymmetricMatrix skew_part(const Matrix& m);
  // Builds from a dense matrix that must already be antisymmetric to `tol`.
  static AntisymmetricMatrix from_dense(const Matrix& m, double tol = 1e-12);
  // Wedge product (x ^ y)_ij = x_i y_j - x_j y_i.
  static AntisymmetricMatrix wedge(std::span<const double> x, std::span<const double> y);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    return i < j ? upper_[index(i, j)] : -upper_[index(j, i)];
  }
  // Sets entry (i, j) and implicitly (j, i) = -value. Requires i != j.
  void set(std::size_t i, std::size_t j, double value);
  void add(std::size_t i, std::size_t j, double value);

  std::span<const double> upper() const noexcept { return upper_; }
  std::span<double> upper() noexcept { return upper_; }

  Matrix to_dense() const;
  bool is_zero() const noexcept;
  bool all_finite() const noexcept;

  AntisymmetricMatrix& operator+=(const AntisymmetricMatrix& rhs);
  AntisymmetricMatrix& operator-=(const AntisymmetricMatrix& rhs);
  AntisymmetricMatrix& operator*=(double s) noexcept;

 private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    // Row-major strict upper triangle, i < j.
    return i * dim_ - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t dim_ = 0;
  std::vector<double> upper_;
};

AntisymmetricMatrix operator+(AntisymmetricMatrix lhs, const AntisymmetricMatrix& rhs);
AntisymmetricMatrix operator-(AntisymmetricMatrix lhs, const AntisymmetricMatrix& rhs);
AntisymmetricMatrix operator*(AntisymmetricMatrix m, double s);
AntisymmetricMatrix operator*(double s, AntisymmetricMatrix m);
Vector operator*(const AntisymmetricMatrix& m, std::span<const double> v);

double frobenius_norm(const Matrix& m);
double frobenius_norm(const AntisymmetricMatrix& m);
// tr(A^T B) = sum_ij A_ij B_ij.
double frobenius_inner(const Matrix& a, const Matrix& b);
double frobenius_inner(const AntisymmetricMatrix& a, const AntisymmetricMatrix& b);

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);

// exp(theta * J) - I, accurate even when theta * J is tiny. Scaling and
// squaring over a truncated power series.
Matrix antisym_expm1(double theta, const AntisymmetricMatrix& j_mat);
// exp(theta * J); orthogonal with determinant +1.
Matrix antisym_exp(double theta, const AntisymmetricMatrix& j_mat);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column k is the eigenvector for values[k]
};

// Cyclic Jacobi eigendecomposition; `m` must be symmetric to within 1e-10
// (relative to its largest entry when that exceeds one).
SymmetricEigen symmetric_eigen(const Matrix& m);

// Symmetric square root of a positive semi-definite matrix. Eigenvalues in
// [-1e-10, 0) are clamped to zero.
Matrix psd_sqrt(const Matrix& m);

struct EigenRange {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool admissible = false;
};

// Spectrum of J^T J and whether it lies in [0, 1] to within 1e-10.
EigenRange check_admissible(const Matrix& j);

double determinant(const Matrix& m);

}  // namespace levycouple
