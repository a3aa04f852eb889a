// SPDX-License-Identifier: Apache-2.0
#include "levycouple/controls.hpp"

#include <algorithm>
#include <cmath>

#include "levycouple/error.hpp"

namespace levycouple {

namespace {

constexpr double kUnitTol = 1e-10;

void require_unit(std::span<const double> nu) {
  const double n = norm(nu);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTol)
    throw Error(ErrorCode::NotUnitVector, "configuration vector must have unit length");
  if (nu.size() < 2) throw Error(ErrorCode::WrongDimension, "dimension must be at least 2");
}

void require_normalized(const AntisymmetricMatrix& gen) {
  const double tr = frobenius_inner(gen, gen);
  if (!std::isfinite(tr) || std::abs(tr - 1.0) > kUnitTol)
    throw Error(ErrorCode::NotNormalizedGenerator, "generator must satisfy tr(J^T J) = 1");
}

// -2 nu nu^T
Matrix reflection_deviation(std::span<const double> nu) {
  Matrix d(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) d(i, j) = -2.0 * nu[i] * nu[j];
  return d;
}

}  // namespace

std::string_view to_string(ControlKind kind) noexcept {
  switch (kind) {
    case ControlKind::Reflection: return "reflection";
    case ControlKind::Synchronous: return "synchronous";
    case ControlKind::Rotation: return "rotation";
    case ControlKind::RotatedReflection: return "rotated-reflection";
    case ControlKind::Mixed: return "mixed";
  }
  return "unknown";
}

std::optional<ControlKind> parse_control_kind(std::string_view name) noexcept {
  for (auto k : {ControlKind::Reflection, ControlKind::Synchronous, ControlKind::Rotation,
                 ControlKind::RotatedReflection, ControlKind::Mixed})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

ControlPair make_control(Matrix deviation, Matrix j_tilde) {
  const std::size_t n = deviation.dim();
  if (j_tilde.dim() != n) throw Error(ErrorCode::DimensionMismatch, "complement dimension differs from control");
  if (!deviation.all_finite() || !j_tilde.all_finite()) throw Error(ErrorCode::NonFinite, "non-finite control");
  ControlPair c;
  c.j_mat = deviation;
  for (std::size_t i = 0; i < n; ++i) c.j_mat(i, i) += 1.0;
  c.sym_part = Matrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c.sym_part(i, j) = 0.5 * (c.j_mat(i, j) + c.j_mat(j, i));
  c.skew_part = AntisymmetricMatrix::skew_part(deviation);
  c.has_complement = std::any_of(j_tilde.data().begin(), j_tilde.data().end(), [](double x) { return x != 0.0; });
  c.deviation = std::move(deviation);
  c.j_tilde = std::move(j_tilde);
  return c;
}

ControlPair general_control(const Matrix& j_mat) {
  const std::size_t n = j_mat.dim();
  Matrix gap = Matrix::identity(n) - j_mat.transpose() * j_mat;
  Matrix dev = j_mat;
  for (std::size_t i = 0; i < n; ++i) dev(i, i) -= 1.0;
  return make_control(std::move(dev), psd_sqrt(gap));
}

ControlPair reflection_control(std::span<const double> nu) {
  require_unit(nu);
  return make_control(reflection_deviation(nu), Matrix(nu.size()));
}

ControlPair synchronous_control(std::size_t dim) {
  if (dim < 2) throw Error(ErrorCode::WrongDimension, "dimension must be at least 2");
  return make_control(Matrix(dim), Matrix(dim));
}

ControlPair rotation_control(double theta, const AntisymmetricMatrix& j_gen) {
  require_normalized(j_gen);
  return make_control(antisym_expm1(theta, j_gen), Matrix(j_gen.dim()));
}

ControlPair rotated_reflection_control(std::span<const double> nu, double theta, const AntisymmetricMatrix& j_gen) {
  require_unit(nu);
  require_normalized(j_gen);
  if (nu.size() != j_gen.dim()) throw Error(ErrorCode::DimensionMismatch, "nu and generator dimensions differ");
  const std::size_t n = nu.size();
  const Matrix e = antisym_expm1(theta, j_gen);
  // (I - 2 nu nu^T)(I + E) - I = E - 2 nu (nu + E^T nu)^T
  const Vector etn = transpose_times(e, nu);
  Matrix dev = e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dev(i, j) -= 2.0 * nu[i] * (nu[j] + etn[j]);
  return make_control(std::move(dev), Matrix(n));
}

ControlPair reflection_rotation_mixture(std::span<const double> nu, double weight, double theta,
                                        const AntisymmetricMatrix& j_gen) {
  require_unit(nu);
  require_normalized(j_gen);
  if (!(weight >= 0.0 && weight <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "mixture weight must lie in [0, 1]");
  if (nu.size() != j_gen.dim()) throw Error(ErrorCode::DimensionMismatch, "nu and generator dimensions differ");
  const std::size_t n = nu.size();
  const Matrix e = antisym_expm1(theta, j_gen);
  const Matrix refl = reflection_deviation(nu);

  Matrix dev = refl * weight + e * (1.0 - weight);

  // I - J^T J = w (1 - w) (4 nu nu^T - R E - E^T R), R = I - 2 nu nu^T.
  Matrix gap(n);
  const double scale = weight * (1.0 - weight);
  if (scale > 0.0) {
    Matrix r = Matrix::identity(n) + refl;
    Matrix re = r * e;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        gap(i, j) = scale * (4.0 * nu[i] * nu[j] - re(i, j) - re(j, i));
  }
  return make_control(std::move(dev), scale > 0.0 ? psd_sqrt(gap) : Matrix(n));
}

double mixed_threshold(std::size_t dim, double mu_k, double mu_h) {
  const double a = mu_h + static_cast<double>(dim) - 1.0;
  return 2.0 * mu_k + a * a;
}

MixedCoefficients mixed_coefficients(const Summaries& summ, double mu_k, double mu_h) {
  if (!summ.nu || !summ.z_mat || !summ.w)
    throw Error(ErrorCode::DegenerateSummaries, "mixed control needs V > 0 and U != 0");
  MixedCoefficients c;
  const Vector znu = *summ.z_mat * std::span<const double>(*summ.nu);
  c.z_nu_sq = dot(znu, znu);
  const double n = static_cast<double>(summ.dim);
  c.gamma = 2.0 * (mu_h + n - 1.0 - 4.0 * c.z_nu_sq);
  c.delta = 2.0 * (mu_k + c.gamma * c.gamma / 8.0 * (1.0 - 2.0 * c.z_nu_sq));
  c.delta0 = mixed_threshold(summ.dim, mu_k, mu_h);
  const double w = *summ.w;
  c.weight = c.delta / (w * w);
  c.theta = c.gamma / w;
  return c;
}

ControlPair mixed_control(const Summaries& summ, double mu_k, double mu_h) {
  const MixedCoefficients c = mixed_coefficients(summ, mu_k, mu_h);
  const double w2 = *summ.w * *summ.w;
  if (!(w2 > c.delta0)) throw Error(ErrorCode::BelowThreshold, "W^2 must exceed the mixed-control threshold");
  return reflection_rotation_mixture(*summ.nu, c.weight, c.theta, *summ.z_mat);
}

double complement_residual(const ControlPair& ctrl) {
  const Matrix m = ctrl.j_mat.transpose() * ctrl.j_mat + ctrl.j_tilde.transpose() * ctrl.j_tilde;
  double worst = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace levycouple
