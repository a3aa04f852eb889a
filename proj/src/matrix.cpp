// SPDX-License-Identifier: Apache-2.0
#include "levycouple/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "levycouple/error.hpp"

namespace levycouple {

namespace {

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::DimensionMismatch, "matrix dimensions differ");
}

}  // namespace

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
  return s;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_dim(dim_, rhs.dim_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_dim(dim_, rhs.dim_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(Matrix m, double s) { return m *= s; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  require_same_dim(lhs.dim(), rhs.dim());
  const std::size_t n = lhs.dim();
  Matrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

Vector operator*(const Matrix& m, std::span<const double> v) {
  require_same_dim(m.dim(), v.size());
  Vector out(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Vector transpose_times(const Matrix& m, std::span<const double> v) {
  require_same_dim(m.dim(), v.size());
  Vector out(m.dim(), 0.0);
  for (std::size_t k = 0; k < m.dim(); ++k) {
    const double vk = v[k];
    for (std::size_t i = 0; i < m.dim(); ++i) out[i] += m(k, i) * vk;
  }
  return out;
}

AntisymmetricMatrix AntisymmetricMatrix::skew_part(const Matrix& m) {
  AntisymmetricMatrix a(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i + 1; j < m.dim(); ++j) a.set(i, j, 0.5 * (m(i, j) - m(j, i)));
  return a;
}

AntisymmetricMatrix AntisymmetricMatrix::from_dense(const Matrix& m, double tol) {
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      if (std::abs(m(i, j) + m(j, i)) > tol)
        throw Error(ErrorCode::NotSymmetric, "matrix is not antisymmetric");
  return skew_part(m);
}

AntisymmetricMatrix AntisymmetricMatrix::wedge(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size());
  AntisymmetricMatrix a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) a.set(i, j, x[i] * y[j] - x[j] * y[i]);
  return a;
}

void AntisymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i == j) throw Error(ErrorCode::DimensionMismatch, "diagonal of an antisymmetric matrix is fixed at zero");
  if (i < j)
    upper_[index(i, j)] = value;
  else
    upper_[index(j, i)] = -value;
}

void AntisymmetricMatrix::add(std::size_t i, std::size_t j, double value) {
  if (i == j) throw Error(ErrorCode::DimensionMismatch, "diagonal of an antisymmetric matrix is fixed at zero");
  if (i < j)
    upper_[index(i, j)] += value;
  else
    upper_[index(j, i)] -= value;
}

Matrix AntisymmetricMatrix::to_dense() const {
  Matrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

bool AntisymmetricMatrix::is_zero() const noexcept {
  return std::all_of(upper_.begin(), upper_.end(), [](double x) { return x == 0.0; });
}

bool AntisymmetricMatrix::all_finite() const noexcept {
  return std::all_of(upper_.begin(), upper_.end(), [](double x) { return std::isfinite(x); });
}

AntisymmetricMatrix& AntisymmetricMatrix::operator+=(const AntisymmetricMatrix& rhs) {
  require_same_dim(dim_, rhs.dim_);
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] += rhs.upper_[k];
  return *this;
}

AntisymmetricMatrix& AntisymmetricMatrix::operator-=(const AntisymmetricMatrix& rhs) {
  require_same_dim(dim_, rhs.dim_);
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] -= rhs.upper_[k];
  return *this;
}

AntisymmetricMatrix& AntisymmetricMatrix::operator*=(double s) noexcept {
  for (double& x : upper_) x *= s;
  return *this;
}

AntisymmetricMatrix operator+(AntisymmetricMatrix lhs, const AntisymmetricMatrix& rhs) { return lhs += rhs; }
AntisymmetricMatrix operator-(AntisymmetricMatrix lhs, const AntisymmetricMatrix& rhs) { return lhs -= rhs; }
AntisymmetricMatrix operator*(AntisymmetricMatrix m, double s) { return m *= s; }
AntisymmetricMatrix operator*(double s, AntisymmetricMatrix m) { return m *= s; }

Vector operator*(const AntisymmetricMatrix& m, std::span<const double> v) {
  require_same_dim(m.dim(), v.size());
  const std::size_t n = m.dim();
  Vector out(n, 0.0);
  const auto up = m.upper();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      out[i] += up[k] * v[j];
      out[j] -= up[k] * v[i];
    }
  return out;
}

double frobenius_norm(const Matrix& m) { return std::sqrt(frobenius_inner(m, m)); }

double frobenius_norm(const AntisymmetricMatrix& m) { return std::sqrt(frobenius_inner(m, m)); }

double frobenius_inner(const Matrix& a, const Matrix& b) {
  require_same_dim(a.dim(), b.dim());
  return dot(a.data(), b.data());
}

double frobenius_inner(const AntisymmetricMatrix& a, const AntisymmetricMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  return 2.0 * dot(a.upper(), b.upper());
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x.size(), y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Matrix antisym_expm1(double theta, const AntisymmetricMatrix& j_mat) {
  if (!std::isfinite(theta) || !j_mat.all_finite())
    throw Error(ErrorCode::NonFinite, "matrix exponential of non-finite input");
  Matrix m = j_mat.to_dense() * theta;
  const double size = frobenius_norm(m);
  int squarings = 0;
  if (size > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(size / 0.5)));
    m *= std::ldexp(1.0, -squarings);
  }

  // Series for exp(M) - I; stop once the next term no longer moves any entry.
  Matrix sum = m;
  Matrix term = m;
  for (int k = 2; k < 40; ++k) {
    term = term * m;
    term *= 1.0 / k;
    sum += term;
    const double t = max_abs(term.data());
    if (t == 0.0 || t <= 1e-17 * max_abs(sum.data())) break;
  }

  // (I + E)^2 - I = 2E + E^2 keeps the small part exact through squaring.
  for (int s = 0; s < squarings; ++s) {
    Matrix sq = sum * sum;
    sum *= 2.0;
    sum += sq;
  }
  return sum;
}

Matrix antisym_exp(double theta, const AntisymmetricMatrix& j_mat) {
  Matrix r = antisym_expm1(theta, j_mat);
  for (std::size_t i = 0; i < r.dim(); ++i) r(i, i) += 1.0;
  return r;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, "eigendecomposition of non-finite matrix");
  const std::size_t n = m.dim();
  const double scale = std::max(1.0, max_abs(m.data()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-10 * scale)
        throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric");

  Matrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Matrix v = Matrix::identity(n);

  const double total = frobenius_norm(a);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off == 0.0 || std::sqrt(off) <= 1e-17 * total) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  SymmetricEigen out{Vector(n), Matrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Matrix psd_sqrt(const Matrix& m) {
  const SymmetricEigen eig = symmetric_eigen(m);
  const std::size_t n = m.dim();
  if (n > 0 && eig.values.front() < -1e-10)
    throw Error(ErrorCode::NotPSD, "matrix has a negative eigenvalue");

  Matrix root(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sqrt(std::max(eig.values[k], 0.0));
    if (s == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = eig.vectors(i, k) * s;
      for (std::size_t j = 0; j < n; ++j) root(i, j) += vi * eig.vectors(j, k);
    }
  }
  // Exact symmetry of the result.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (root(i, j) + root(j, i));
      root(i, j) = avg;
      root(j, i) = avg;
    }
  return root;
}

EigenRange check_admissible(const Matrix& j) {
  const SymmetricEigen eig = symmetric_eigen(j.transpose() * j);
  EigenRange r;
  r.min_eigenvalue = eig.values.front();
  r.max_eigenvalue = eig.values.back();
  r.admissible = r.min_eigenvalue >= -1e-10 && r.max_eigenvalue <= 1.0 + 1e-10;
  return r;
}

double determinant(const Matrix& m) {
  const std::size_t n = m.dim();
  Matrix lu = m;
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(lu(r, c)) > std::abs(lu(pivot, c))) pivot = r;
    if (lu(pivot, c) == 0.0) return 0.0;
    if (pivot != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(lu(pivot, k), lu(c, k));
      det = -det;
    }
    det *= lu(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = lu(r, c) / lu(c, c);
      for (std::size_t k = c; k < n; ++k) lu(r, k) -= f * lu(c, k);
    }
  }
  return det;
}

}  // namespace levycouple
