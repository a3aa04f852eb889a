// SPDX-License-Identifier: Apache-2.0
#include "levycouple/ito_rates.hpp"

#include <cmath>

#include "levycouple/error.hpp"

namespace levycouple {

namespace {

// x^T M y for a dense M.
double bilinear(std::span<const double> x, const Matrix& m, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.dim(); ++j) row += m(i, j) * y[j];
    s += x[i] * row;
  }
  return s;
}

// Symmetric part of J - I.
Matrix symmetric_deviation(const ControlPair& ctrl) {
  const Matrix& d = ctrl.deviation;
  Matrix s(d.dim());
  for (std::size_t i = 0; i < d.dim(); ++i)
    for (std::size_t j = 0; j < d.dim(); ++j) s(i, j) = 0.5 * (d(i, j) + d(j, i));
  return s;
}

}  // namespace

ItoSystemPrediction predict_planar(const ControlPair& ctrl, const Summaries& summ) {
  if (summ.dim != 2 || ctrl.dim() != 2) throw Error(ErrorCode::WrongDimension, "planar rates need dimension 2");
  if (!summ.nu) throw Error(ErrorCode::DegenerateSummaries, "planar rates need V > 0");
  const Vector& nu = *summ.nu;
  const Vector perp{-nu[1], nu[0]};
  const Matrix ds = symmetric_deviation(ctrl);
  // 1 - S11 and 1 - S22 straight from J - I.
  const double one_minus_s11 = -bilinear(nu, ds, nu);
  const double one_minus_s22 = -bilinear(perp, ds, perp);
  const double a12 = ctrl.skew_part(0, 1);  // invariant under rotation of the frame
  const double v = summ.v;
  const double root2 = std::sqrt(2.0);

  ItoSystemPrediction p;
  p.qv_v_rate = 2.0 * one_minus_s11;
  p.drift_v_rate = one_minus_s22 / v;
  p.cov_uv_rate = -2.0 * root2 * a12 * v;
  p.qv_u_rate = 4.0 * (2.0 - one_minus_s22) * v * v;
  p.drift_u_rate = -2.0 * root2 * a12;
  p.has_t_rates = true;
  return p;
}

ItoSystemPrediction predict_general(const ControlPair& ctrl, const Summaries& summ) {
  if (summ.dim != ctrl.dim()) throw Error(ErrorCode::DimensionMismatch, "control and state dimensions differ");
  if (!summ.nu || !summ.z_mat || !summ.w)
    throw Error(ErrorCode::DegenerateSummaries, "general rates need V > 0 and U != 0");
  const Vector& nu = *summ.nu;
  const AntisymmetricMatrix& z = *summ.z_mat;
  const double n = static_cast<double>(summ.dim);
  const double w = *summ.w;
  const double v = summ.v;

  const Matrix ds = symmetric_deviation(ctrl);
  const double one_minus_nsn = -bilinear(nu, ds, nu);  // 1 - nu^T S nu
  const double n_minus_trs = -ds.trace();               // n - tr S
  const Vector znu = z * std::span<const double>(nu);
  // q = nu^T Z^T (I + S) Z nu = 2 |Z nu|^2 + (Z nu)^T D_s (Z nu)
  const double q = 2.0 * dot(znu, znu) + bilinear(znu, ds, znu);
  // nu^T Z^T A nu = (Z nu)^T (A nu)
  const Vector anu = ctrl.skew_part * std::span<const double>(nu);
  const double zt_a = dot(znu, anu);
  const double tr_za = frobenius_inner(z, ctrl.skew_part);
  // n - 1 + tr S - nu^T S nu
  const double spread = (n - 1.0) + (n - n_minus_trs) - (1.0 - one_minus_nsn);

  ItoSystemPrediction p;
  p.qv_k = 0.5 * one_minus_nsn;
  p.drift_k = 0.25 * (n_minus_trs - 2.0 * one_minus_nsn);
  p.cov_kh = -zt_a / w;
  p.qv_h = 2.0 * q / (w * w);
  p.drift_h = -0.5 * tr_za / w + 0.5 * (spread - 4.0 * q) / (w * w);
  p.has_tau_rates = true;

  p.qv_v_rate = 2.0 * one_minus_nsn;
  p.drift_v_rate = (n_minus_trs - one_minus_nsn) / v;
  p.cov_uv_rate = -4.0 * zt_a * v;
  p.qv_u_rate = 8.0 * q * v * v;
  p.drift_u_rate = -2.0 * tr_za + 2.0 * (spread - 2.0 * q) * v * v / summ.u;
  p.has_t_rates = true;
  return p;
}

ItoSystemPrediction tau_rates_from_t_rates(const ItoSystemPrediction& t, double v, double u) {
  if (!(v > 0.0) || u == 0.0) throw Error(ErrorCode::DegenerateSummaries, "conversion needs V > 0 and U != 0");
  // d tau = 4 dt / V^2, so a per-t rate r becomes r V^2 / 4 per tau.
  const double c = v * v / 4.0;
  ItoSystemPrediction p = t;
  p.qv_k = t.qv_v_rate / (v * v) * c;
  p.drift_k = (t.drift_v_rate / v - 0.5 * t.qv_v_rate / (v * v)) * c;
  p.cov_kh = t.cov_uv_rate / (u * v) * c;
  p.qv_h = t.qv_u_rate / (u * u) * c;
  p.drift_h = (t.drift_u_rate / u - 0.5 * t.qv_u_rate / (u * u)) * c;
  p.has_tau_rates = true;
  return p;
}

}  // namespace levycouple
