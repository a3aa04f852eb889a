// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo estimates of the summary rates, comparison against the closed
// forms, and the algebraic bounds on the configuration (nu, Z).
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "levycouple/controls.hpp"
#include "levycouple/ito_rates.hpp"
#include "levycouple/rng.hpp"
#include "levycouple/state.hpp"

namespace levycouple {

struct RateEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Sample means of the per-step increments scaled to rates: Delta V / h,
// (Delta V)^2 / h, ... on the t clock, and Delta K / Delta tau, ... with
// Delta tau = 4 h / V^2 on the tau clock.
struct EmpiricalRates {
  RateEstimate drift_v, qv_v, cov_uv, drift_u, qv_u;
  RateEstimate drift_k, qv_k, cov_kh, drift_h, qv_h;
  bool has_tau_rates = false;  // false when U = 0 at the state
  std::size_t n_samples = 0;
  double h = 0.0;
};

// n_samples independent single steps of size h from `state` under `ctrl`.
// Requires V > 0 and n_samples >= 2.
EmpiricalRates estimate_rates(const ControlPair& ctrl, const CoupledState& state, double h, std::size_t n_samples,
                              Rng& rng);

struct RateCheck {
  std::string name;  // drift_v, qv_v, ..., qv_h
  double predicted = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  bool pass = false;
};

// Compares every rate present in both inputs: |empirical - predicted| <= n_se * se,
// plus a rounding allowance of 1e-12 (1 + |predicted|).
std::vector<RateCheck> compare_rates(const EmpiricalRates& emp, const ItoSystemPrediction& pred, double n_se = 4.0);

// |tr(Z^T (I - 2 nu nu^T) J)| against sqrt(tr(Z0^T Z0)), Z0 = P Z P, P = I - nu nu^T.
struct RotatedReflectionBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool has_candidate = false;  // Z0 != 0
  double candidate_lhs = 0.0;  // left side at J = Z0 / |Z0|_F
  double candidate_ratio = 0.0;
};

// Requires tr(Z^T Z) = 1 and tr(J^T J) = 1 (NotNormalized) and a unit nu.
RotatedReflectionBoundReport check_rotated_reflection_bound(const AntisymmetricMatrix& z_mat,
                                                            std::span<const double> nu,
                                                            const AntisymmetricMatrix& j_gen);

struct ZnuBoundReport {
  double value = 0.0;  // |Z nu|^2
  bool holds = false;  // value <= 1/2 + 1e-12
};

ZnuBoundReport check_znu_bound(const AntisymmetricMatrix& z_mat, std::span<const double> nu);

// Leading terms of the tau-clock rates for large W, with the orientation used
// by mixed_control (rotation angle +theta about the generator). The residual
// against predict_general is O(W^-4).
// Rotation by gamma / W about Z.
ItoSystemPrediction rotation_leading_rates(const Summaries& summ, double gamma);
// Mixture with weight delta / W^2 on the reflection.
ItoSystemPrediction mixed_leading_rates(const Summaries& summ, double mu_k, double mu_h);
// Reflection composed with a rotation by gamma / W about j_gen.
ItoSystemPrediction rotated_reflection_leading_rates(const Summaries& summ, double gamma,
                                                     const AntisymmetricMatrix& j_gen);

}  // namespace levycouple
