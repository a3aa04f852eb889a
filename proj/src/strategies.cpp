// SPDX-License-Identifier: Apache-2.0
#include "levycouple/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "levycouple/engine.hpp"
#include "levycouple/error.hpp"
#include "levycouple/rng.hpp"

namespace levycouple {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require_nu(const Summaries& summ) {
  if (!summ.nu) throw Error(ErrorCode::DegenerateSummaries, "strategy needs V > 0");
}

Vector first_axis(std::size_t dim) {
  Vector e(dim, 0.0);
  e[0] = 1.0;
  return e;
}

// Reflects about the first axis until the paths separate.
void separate(CoupledState& state, Rng& rng, const EngineConfig& cfg) {
  const ControlPair kick = reflection_control(first_axis(state.dim));
  std::uint64_t steps = 0;
  while (norm(state.separation) == 0.0) {
    if (steps++ >= cfg.step_budget) throw Error(ErrorCode::StepBudgetExhausted, "could not separate the paths");
    const double scale = std::max(std::abs(summarize(state).u), cfg.epsilon_v * cfg.epsilon_v);
    step(state, kick, rng, std::min(cfg.dt_max, cfg.dt_scale * scale));
  }
}

}  // namespace

void PlanarStrategyConfig::validate() const {
  if (!positive_finite(kappa) || !positive_finite(epsilon) || !(epsilon < kappa))
    throw Error(ErrorCode::ConfigInvalid, "planar strategy needs 0 < epsilon < kappa");
}

PlanarChoice planar_select(const Summaries& summ, PlanarMode mode, const PlanarStrategyConfig& cfg) {
  if (summ.dim != 2) throw Error(ErrorCode::WrongDimension, "planar strategy needs dimension 2");
  require_nu(summ);
  const double w2 = *summ.w * *summ.w;
  if (mode == PlanarMode::Reflect && w2 >= cfg.kappa * cfg.kappa)
    mode = PlanarMode::Synch;
  else if (mode == PlanarMode::Synch && w2 <= (cfg.kappa - cfg.epsilon) * (cfg.kappa - cfg.epsilon))
    mode = PlanarMode::Reflect;
  if (mode == PlanarMode::Reflect) return {reflection_control(*summ.nu), mode};
  return {synchronous_control(2), mode};
}

void AdaptiveStrategyConfig::validate(std::size_t dim) const {
  if (dim < 3) throw Error(ErrorCode::WrongDimension, "adaptive strategy needs dimension at least 3");
  if (!positive_finite(mu_k) || !positive_finite(mu_h) || !(mu_k < mu_h) || !(mu_h < 2.0 * mu_k))
    throw Error(ErrorCode::ConfigInvalid, "need 0 < mu_k < mu_h < 2 mu_k");
  if (!positive_finite(w_threshold) || !(w_threshold * w_threshold > mixed_threshold(dim, mu_k, mu_h)))
    throw Error(ErrorCode::ConfigInvalid, "w_threshold^2 must exceed the mixed-control threshold");
  if (prep_enabled && !positive_finite(w0)) throw Error(ErrorCode::ConfigInvalid, "w0 must be positive");
}

AdaptiveChoice adaptive_select(const Summaries& summ, const AdaptiveStrategyConfig& cfg) {
  if (summ.dim < 3) throw Error(ErrorCode::WrongDimension, "adaptive strategy needs dimension at least 3");
  require_nu(summ);
  if (summ.u > 0.0 && summ.w && *summ.w > cfg.w_threshold)
    return {mixed_control(summ, cfg.mu_k, cfg.mu_h), AdaptiveRegime::Mixed};
  return {synchronous_control(summ.dim), AdaptiveRegime::Synch};
}

PlanarDowncrossingStrategy::PlanarDowncrossingStrategy(PlanarStrategyConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::unique_ptr<Strategy> PlanarDowncrossingStrategy::clone() const {
  return std::make_unique<PlanarDowncrossingStrategy>(*this);
}

void PlanarDowncrossingStrategy::check_dimension(std::size_t dim) const {
  if (dim != 2) throw Error(ErrorCode::WrongDimension, "planar strategy needs dimension 2");
}

void PlanarDowncrossingStrategy::prepare(CoupledState& state, Rng& rng, const EngineConfig& cfg) {
  mode_ = PlanarMode::Reflect;
  planar_prepare(state, rng, cfg);
}

ControlPair PlanarDowncrossingStrategy::select(const Summaries& summ) {
  PlanarChoice c = planar_select(summ, mode_, cfg_);
  mode_ = c.mode;
  return std::move(c.control);
}

std::string_view PlanarDowncrossingStrategy::mode_name(int mode) const {
  return mode == static_cast<int>(PlanarMode::Reflect) ? "reflect" : "synch";
}

AdaptiveMixedStrategy::AdaptiveMixedStrategy(AdaptiveStrategyConfig cfg, std::size_t dim) : cfg_(cfg) {
  cfg_.validate(dim);
}

std::unique_ptr<Strategy> AdaptiveMixedStrategy::clone() const { return std::make_unique<AdaptiveMixedStrategy>(*this); }

void AdaptiveMixedStrategy::check_dimension(std::size_t dim) const { cfg_.validate(dim); }

void AdaptiveMixedStrategy::prepare(CoupledState& state, Rng& rng, const EngineConfig& cfg) {
  regime_ = AdaptiveRegime::Synch;
  if (cfg_.prep_enabled) adaptive_prepare(state, cfg_.w0, rng, cfg);
}

ControlPair AdaptiveMixedStrategy::select(const Summaries& summ) {
  AdaptiveChoice c = adaptive_select(summ, cfg_);
  regime_ = c.regime;
  return std::move(c.control);
}

std::string_view AdaptiveMixedStrategy::mode_name(int mode) const {
  return mode == static_cast<int>(AdaptiveRegime::Mixed) ? "mixed" : "synch";
}

void ReflectionStrategy::check_dimension(std::size_t dim) const {
  if (dim < 2) throw Error(ErrorCode::WrongDimension, "need dimension at least 2");
}

ControlPair ReflectionStrategy::select(const Summaries& summ) {
  require_nu(summ);
  return reflection_control(*summ.nu);
}

void ConstantControlStrategy::check_dimension(std::size_t dim) const {
  if (dim != ctrl_.dim()) throw Error(ErrorCode::DimensionMismatch, "control dimension differs from state");
}

void planar_prepare(CoupledState& state, Rng& rng, const EngineConfig& cfg) {
  if (state.dim != 2) throw Error(ErrorCode::WrongDimension, "planar preparation needs dimension 2");
  Summaries summ = summarize(state);
  if (summ.v == 0.0 && summ.u == 0.0) {
    state.coupled_flag = true;
    return;
  }
  separate(state, rng, cfg);
  summ = summarize(state);
  if (summ.u == 0.0) return;

  // Synchronous phase: V is frozen and U moves as a Brownian motion with
  // variance 8 V^2 per unit time. Steps shrink with U so the hit is resolved.
  const ControlPair sync = synchronous_control(2);
  const double sign0 = std::copysign(1.0, summ.u);
  std::uint64_t steps = 0;
  while (std::abs(summ.u) > cfg.epsilon_u && std::copysign(1.0, summ.u) == sign0 && summ.u != 0.0) {
    if (state.t_time >= cfg.t_max) return;
    if (steps++ >= cfg.step_budget) throw Error(ErrorCode::StepBudgetExhausted, "area did not reach zero");
    double h = std::min(cfg.dt_max, cfg.dt_scale * summ.u * summ.u / (8.0 * summ.v * summ.v));
    h = std::min(h, cfg.t_max - state.t_time);
    if (!(h > 0.0)) return;
    step(state, sync, rng, h);
    summ = summarize(state);
  }
  state.area_diff = AntisymmetricMatrix(2);
}

void adaptive_prepare(CoupledState& state, double w0, Rng& rng, const EngineConfig& cfg) {
  if (!positive_finite(w0)) throw Error(ErrorCode::ConfigInvalid, "w0 must be positive");
  Summaries summ = summarize(state);
  if (summ.v == 0.0 && summ.u == 0.0) {
    state.coupled_flag = true;
    return;
  }
  separate(state, rng, cfg);
  summ = summarize(state);

  const ControlPair sync = synchronous_control(state.dim);
  std::uint64_t steps = 0;
  while (!(*summ.w >= w0)) {
    if (state.t_time >= cfg.t_max) return;
    if (steps++ >= cfg.step_budget) throw Error(ErrorCode::StepBudgetExhausted, "W did not reach w0");
    // U moves by about V sqrt(h); the step grows with U / V once U dominates V^2.
    const double v2 = summ.v * summ.v;
    double h = std::min(cfg.dt_max, cfg.dt_scale * std::max(v2, summ.u * summ.u / v2));
    h = std::min(h, cfg.t_max - state.t_time);
    if (!(h > 0.0)) return;
    step(state, sync, rng, h);
    summ = summarize(state);
  }
}

}  // namespace levycouple
