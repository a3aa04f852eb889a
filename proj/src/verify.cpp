// SPDX-License-Identifier: Apache-2.0
#include "levycouple/verify.hpp"

#include <array>
#include <cmath>

#include "levycouple/engine.hpp"
#include "levycouple/error.hpp"

namespace levycouple {

namespace {

// Welford accumulator.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  RateEstimate estimate() const {
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
  }
};

void require_frobenius_unit(const AntisymmetricMatrix& m, const char* what) {
  const double tr = frobenius_inner(m, m);
  if (!std::isfinite(tr) || std::abs(tr - 1.0) > 1e-8) throw Error(ErrorCode::NotNormalized, what);
}

}  // namespace

EmpiricalRates estimate_rates(const ControlPair& ctrl, const CoupledState& state, double h, std::size_t n_samples,
                              Rng& rng) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::NonPositiveStep, "h must be positive");
  if (n_samples < 2) throw Error(ErrorCode::ConfigInvalid, "need at least two samples");
  const Summaries s0 = summarize(state);
  if (!(s0.v > 0.0)) throw Error(ErrorCode::DegenerateSummaries, "rate estimation needs V > 0");
  const bool tau = s0.u != 0.0;
  const double dtau = 4.0 * h / (s0.v * s0.v);

  std::array<Moments, 10> m;
  CoupledState next;
  for (std::size_t i = 0; i < n_samples; ++i) {
    next = state;
    step(next, ctrl, rng, h);
    const double v1 = norm(next.separation);
    const double u1 = area_summary(next.area_diff);
    const double dv = v1 - s0.v;
    const double du = u1 - s0.u;
    m[0].add(dv / h);
    m[1].add(dv * dv / h);
    m[2].add(du * dv / h);
    m[3].add(du / h);
    m[4].add(du * du / h);
    if (tau) {
      const double dk = std::log(v1 / s0.v);
      const double dh = std::log(std::abs(u1) / std::abs(s0.u));
      m[5].add(dk / dtau);
      m[6].add(dk * dk / dtau);
      m[7].add(dk * dh / dtau);
      m[8].add(dh / dtau);
      m[9].add(dh * dh / dtau);
    }
  }

  EmpiricalRates r;
  r.drift_v = m[0].estimate();
  r.qv_v = m[1].estimate();
  r.cov_uv = m[2].estimate();
  r.drift_u = m[3].estimate();
  r.qv_u = m[4].estimate();
  if (tau) {
    r.drift_k = m[5].estimate();
    r.qv_k = m[6].estimate();
    r.cov_kh = m[7].estimate();
    r.drift_h = m[8].estimate();
    r.qv_h = m[9].estimate();
  }
  r.has_tau_rates = tau;
  r.n_samples = n_samples;
  r.h = h;
  return r;
}

std::vector<RateCheck> compare_rates(const EmpiricalRates& emp, const ItoSystemPrediction& pred, double n_se) {
  std::vector<RateCheck> out;
  auto add = [&](const char* name, const RateEstimate& e, double p) {
    const double slack = n_se * e.se + 1e-12 * (1.0 + std::abs(p));
    out.push_back({name, p, e.mean, e.se, std::abs(e.mean - p) <= slack});
  };
  if (pred.has_t_rates) {
    add("drift_v", emp.drift_v, pred.drift_v_rate);
    add("qv_v", emp.qv_v, pred.qv_v_rate);
    add("cov_uv", emp.cov_uv, pred.cov_uv_rate);
    add("drift_u", emp.drift_u, pred.drift_u_rate);
    add("qv_u", emp.qv_u, pred.qv_u_rate);
  }
  if (pred.has_tau_rates && emp.has_tau_rates) {
    add("drift_k", emp.drift_k, pred.drift_k);
    add("qv_k", emp.qv_k, pred.qv_k);
    add("cov_kh", emp.cov_kh, pred.cov_kh);
    add("drift_h", emp.drift_h, pred.drift_h);
    add("qv_h", emp.qv_h, pred.qv_h);
  }
  return out;
}

RotatedReflectionBoundReport check_rotated_reflection_bound(const AntisymmetricMatrix& z_mat,
                                                            std::span<const double> nu,
                                                            const AntisymmetricMatrix& j_gen) {
  const std::size_t n = z_mat.dim();
  if (nu.size() != n || j_gen.dim() != n) throw Error(ErrorCode::DimensionMismatch, "dimensions differ");
  require_frobenius_unit(z_mat, "Z must satisfy tr(Z^T Z) = 1");
  require_frobenius_unit(j_gen, "generator must satisfy tr(J^T J) = 1");
  if (std::abs(norm(nu) - 1.0) > 1e-10) throw Error(ErrorCode::NotUnitVector, "nu must have unit length");

  // Z0 = P Z P with P = I - nu nu^T, i.e. Z - nu (Z^T nu)^T - (Z nu) nu^T.
  const Vector znu = z_mat * nu;
  AntisymmetricMatrix z0 = z_mat;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) z0.add(i, j, -(znu[i] * nu[j] - nu[i] * znu[j]));

  // tr(Z^T (I - 2 nu nu^T) J) = <Z, J> - 2 (Z nu) . (J nu)
  auto lhs_at = [&](const AntisymmetricMatrix& j) {
    const Vector jnu = j * nu;
    return std::abs(frobenius_inner(z_mat, j) - 2.0 * dot(znu, jnu));
  };

  // tr(Z^T Z0) = |Z0|_F^2 since P is a projection; the norm avoids sqrt of round-off.
  const double z0_norm = frobenius_norm(z0);
  RotatedReflectionBoundReport r;
  r.lhs = lhs_at(j_gen);
  r.rhs = z0_norm;
  r.holds = r.lhs <= r.rhs + 1e-10;
  if (z0_norm > 1e-12) {
    r.has_candidate = true;
    r.candidate_lhs = lhs_at(z0 * (1.0 / z0_norm));
    r.candidate_ratio = r.candidate_lhs / r.rhs;
  }
  return r;
}

ZnuBoundReport check_znu_bound(const AntisymmetricMatrix& z_mat, std::span<const double> nu) {
  if (nu.size() != z_mat.dim()) throw Error(ErrorCode::DimensionMismatch, "dimensions differ");
  const Vector znu = z_mat * nu;
  ZnuBoundReport r;
  r.value = dot(znu, znu);
  r.holds = r.value <= 0.5 + 1e-12;
  return r;
}

namespace {

struct Config {
  double z;  // |Z nu|^2
  double w;
  double n;
};

Config config_of(const Summaries& summ) {
  if (!summ.nu || !summ.z_mat || !summ.w)
    throw Error(ErrorCode::DegenerateSummaries, "leading rates need V > 0 and U != 0");
  const Vector znu = *summ.z_mat * std::span<const double>(*summ.nu);
  return {dot(znu, znu), *summ.w, static_cast<double>(summ.dim)};
}

}  // namespace

ItoSystemPrediction rotation_leading_rates(const Summaries& summ, double gamma) {
  const Config c = config_of(summ);
  const double w2 = c.w * c.w;
  ItoSystemPrediction p;
  p.qv_k = gamma * gamma / 4.0 * c.z / w2;
  p.drift_k = gamma * gamma / 8.0 * (1.0 - 2.0 * c.z) / w2;
  p.cov_kh = -gamma * c.z / w2;
  p.qv_h = 4.0 * c.z / w2;
  p.drift_h = -(gamma / 2.0 - (c.n - 1.0 - 4.0 * c.z)) / w2;
  p.has_tau_rates = true;
  return p;
}

ItoSystemPrediction mixed_leading_rates(const Summaries& summ, double mu_k, double mu_h) {
  const Config c = config_of(summ);
  const double w2 = c.w * c.w;
  const double a = mu_h + c.n - 1.0 - 4.0 * c.z;  // gamma / 2
  ItoSystemPrediction p;
  p.qv_k = (2.0 * mu_k + a * a * (1.0 - c.z)) / w2;
  p.drift_k = -mu_k / w2;
  p.cov_kh = -2.0 * a * c.z / w2;
  p.qv_h = 4.0 * c.z / w2;
  p.drift_h = -mu_h / w2;
  p.has_tau_rates = true;
  return p;
}

ItoSystemPrediction rotated_reflection_leading_rates(const Summaries& summ, double gamma,
                                                     const AntisymmetricMatrix& j_gen) {
  const Config c = config_of(summ);
  const Vector& nu = *summ.nu;
  const AntisymmetricMatrix& z = *summ.z_mat;
  const double w2 = c.w * c.w;
  const Vector znu = z * std::span<const double>(nu);
  const Vector jnu = j_gen * std::span<const double>(nu);
  const Vector jjnu = j_gen * std::span<const double>(jnu);
  const double tr_zrj = frobenius_inner(z, j_gen) - 2.0 * dot(znu, jnu);

  ItoSystemPrediction p;
  p.qv_k = 1.0 - gamma * gamma / (4.0 * w2) * dot(jnu, jnu);
  p.drift_k = -(0.5 - gamma * gamma / (8.0 * w2));
  // The first-order skew part annihilates nu, so the covariance starts at W^-3.
  p.cov_kh = -gamma * gamma / (2.0 * w2 * c.w) * dot(znu, jjnu);
  p.qv_h = 4.0 * c.z / w2;
  // The second-order skew part contributes at W^-3 as well.
  p.drift_h = -(gamma / 2.0 * tr_zrj - (c.n - 1.0 - 4.0 * c.z)) / w2 -
              gamma * gamma / (2.0 * w2 * c.w) * dot(znu, jjnu);
  p.has_tau_rates = true;
  return p;
}

}  // namespace levycouple
