// SPDX-License-Identifier: Apache-2.0
//
// Closed-form drift and quadratic-variation rates of the summaries under a
// frozen control. Rates on the t clock describe V and U; rates on the tau
// clock (4 dt = V^2 dtau) describe K = log V and H = log |U|.
#pragma once

#include "levycouple/controls.hpp"
#include "levycouple/state.hpp"

namespace levycouple {

struct ItoSystemPrediction {
  // per unit t
  double drift_v_rate = 0.0;
  double qv_v_rate = 0.0;
  double cov_uv_rate = 0.0;
  double drift_u_rate = 0.0;
  double qv_u_rate = 0.0;
  bool has_t_rates = false;
  // per unit tau
  double drift_k = 0.0;
  double qv_k = 0.0;
  double cov_kh = 0.0;
  double drift_h = 0.0;
  double qv_h = 0.0;
  bool has_tau_rates = false;
};

// Planar rates in the frame (nu, nu rotated by +pi/2):
//   (dV)^2 = 2 (1 - S11), drift V = (1 - S22) / V, dV dU = -2 sqrt2 A12 V,
//   (dU)^2 = 4 (1 + S22) V^2, drift U = -2 sqrt2 A12.
// Requires dimension 2 and V > 0. Fills only the t-clock rates.
ItoSystemPrediction predict_planar(const ControlPair& ctrl, const Summaries& summ);

// General rates for dimension >= 2 with V > 0 and U != 0. Fills both clocks.
// With S = I + D_s and q = nu^T Z^T (I + S) Z nu,
//   (dK)^2 = 1/2 (1 - nu^T S nu)
//   drift K = 1/4 (n - tr S - 2 (1 - nu^T S nu))
//   dK dH = -(nu^T Z^T A nu) / W
//   (dH)^2 = 2 q / W^2
//   drift H = -1/2 tr(Z^T A) / W + 1/2 (n - 1 + tr S - nu^T S nu - 4 q) / W^2
ItoSystemPrediction predict_general(const ControlPair& ctrl, const Summaries& summ);

// Converts t-clock rates for (V, U) into tau-clock rates for (K, H) by Ito's
// formula and the time change; used to cross-check the two predictors.
ItoSystemPrediction tau_rates_from_t_rates(const ItoSystemPrediction& t_rates, double v, double u);

}  // namespace levycouple
