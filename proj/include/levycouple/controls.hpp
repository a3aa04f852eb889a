// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "levycouple/matrix.hpp"
#include "levycouple/state.hpp"

namespace levycouple {

// A co-adapted coupling control: dA = J^T dB + Jt^T dC with C independent of B.
//
// `deviation` holds J - I computed without cancellation; the engine and the
// rate predictors work from it so that controls within 1e-16 of the identity
// still move the separation.
struct ControlPair {
  Matrix j_mat;
  Matrix j_tilde;
  Matrix sym_part;               // (J + J^T) / 2
  AntisymmetricMatrix skew_part; // (J - J^T) / 2
  Matrix deviation;              // J - I
  bool has_complement = false;   // false when Jt == 0

  std::size_t dim() const noexcept { return j_mat.dim(); }
};

enum class ControlKind { Reflection, Synchronous, Rotation, RotatedReflection, Mixed };

std::string_view to_string(ControlKind kind) noexcept;
std::optional<ControlKind> parse_control_kind(std::string_view name) noexcept;

// Assembles the pair from J - I and the complement. J and S are derived.
ControlPair make_control(Matrix deviation, Matrix j_tilde);
// Any J with 0 <= J^T J <= I; the complement is the symmetric root of I - J^T J.
ControlPair general_control(const Matrix& j_mat);

// J = I - 2 nu nu^T.
ControlPair reflection_control(std::span<const double> nu);
// J = I.
ControlPair synchronous_control(std::size_t dim);
// J = exp(theta * gen), gen antisymmetric with tr(gen^T gen) = 1.
ControlPair rotation_control(double theta, const AntisymmetricMatrix& j_gen);
// J = (I - 2 nu nu^T) exp(theta * gen).
ControlPair rotated_reflection_control(std::span<const double> nu, double theta, const AntisymmetricMatrix& j_gen);
// J = weight * reflection(nu) + (1 - weight) * rotation(theta, gen), weight in [0, 1].
ControlPair reflection_rotation_mixture(std::span<const double> nu, double weight, double theta,
                                        const AntisymmetricMatrix& j_gen);

struct MixedCoefficients {
  double z_nu_sq = 0.0;  // |Z nu|^2
  double gamma = 0.0;
  double delta = 0.0;
  double delta0 = 0.0;   // threshold on W^2
  double weight = 0.0;   // delta / W^2
  double theta = 0.0;    // rotation angle applied with generator Z
};

// Threshold 2 mu_K + (mu_H + n - 1)^2 below which the mixed control is undefined.
double mixed_threshold(std::size_t dim, double mu_k, double mu_h);

// Coefficients of the adaptively mixed control at the given summaries.
//   gamma = 2 (mu_H + n - 1 - 4 |Z nu|^2)
//   delta = 2 (mu_K + gamma^2 / 8 (1 - 2 |Z nu|^2))
// The rotation runs at angle +gamma / W about Z: with dA = J^T dB this is the
// orientation whose skew part pushes the drift of log U down by gamma / (2 W^2).
MixedCoefficients mixed_coefficients(const Summaries& summ, double mu_k, double mu_h);

ControlPair mixed_control(const Summaries& summ, double mu_k, double mu_h);

// Largest violation of J^T J + Jt^T Jt = I, entrywise.
double complement_residual(const ControlPair& ctrl);

}  // namespace levycouple
