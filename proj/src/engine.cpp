// SPDX-License-Identifier: Apache-2.0
#include "levycouple/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "levycouple/error.hpp"
#include "levycouple/ito_rates.hpp"

namespace levycouple {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void clamp_coupled(CoupledState& state) {
  std::fill(state.separation.begin(), state.separation.end(), 0.0);
  state.area_diff = AntisymmetricMatrix(state.dim);
  state.coupled_flag = true;
}

Vector unit_vector(std::size_t dim, std::size_t axis) {
  Vector e(dim, 0.0);
  e[axis] = 1.0;
  return e;
}

}  // namespace

void EngineConfig::validate() const {
  if (!positive_finite(dt_max)) throw Error(ErrorCode::ConfigInvalid, "dt_max must be positive");
  if (!positive_finite(dt_scale)) throw Error(ErrorCode::ConfigInvalid, "dt_scale must be positive");
  if (!positive_finite(t_max)) throw Error(ErrorCode::ConfigInvalid, "t_max must be positive");
  if (!positive_finite(epsilon_v)) throw Error(ErrorCode::ConfigInvalid, "epsilon_v must be positive");
  if (!positive_finite(epsilon_u)) throw Error(ErrorCode::ConfigInvalid, "epsilon_u must be positive");
  if (step_budget == 0) throw Error(ErrorCode::ConfigInvalid, "step_budget must be positive");
}

void EngineConfig::validate_against(const CoupledState& init) const {
  validate();
  const Summaries s = summarize(init);
  if (s.v > 0.0 && !(epsilon_v < 0.5 * s.v))
    throw Error(ErrorCode::ConfigInvalid, "epsilon_v must be small against the initial separation");
  const double u_scale = std::max(std::abs(s.u), s.v * s.v);
  if (u_scale > 0.0 && !(epsilon_u < 0.5 * u_scale))
    throw Error(ErrorCode::ConfigInvalid, "epsilon_u must be small against the initial area scale");
}

EngineConfig with_default_tolerances(EngineConfig cfg, const CoupledState& init) {
  const Summaries s = summarize(init);
  const double u_scale = std::max(std::abs(s.u), s.v * s.v);
  if (s.v > 0.0) cfg.epsilon_v = 1e-4 * s.v;
  if (u_scale > 0.0) cfg.epsilon_u = 1e-4 * u_scale;
  return cfg;
}

void step(CoupledState& state, const ControlPair& ctrl, Rng& rng, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::NonPositiveStep, "step must be positive");
  const std::size_t n = state.dim;
  if (ctrl.dim() != n) throw Error(ErrorCode::DimensionMismatch, "control dimension differs from state");

  const double sd = std::sqrt(h);
  Vector db(n);
  for (double& x : db) x = sd * rng.gaussian();

  // dX = dA - dB = (J - I)^T dB + Jt^T dC, formed without cancellation.
  Vector dx = transpose_times(ctrl.deviation, db);
  if (ctrl.has_complement) {
    Vector dc(n);
    for (double& x : dc) x = sd * rng.gaussian();
    const Vector extra = transpose_times(ctrl.j_tilde, dc);
    for (std::size_t i = 0; i < n; ++i) dx[i] += extra[i];
  }
  Vector dy(n);
  for (std::size_t i = 0; i < n; ++i) dy[i] = 2.0 * db[i] + dx[i];

  const double v2 = dot(state.separation, state.separation);
  state.area_diff += area_increment(state, dy, ctrl.skew_part, h);
  for (std::size_t i = 0; i < n; ++i) {
    state.b_path[i] += db[i];
    state.separation[i] += dx[i];
  }
  state.t_time += h;
  if (v2 > 0.0) state.tau_time += 4.0 * h / v2;
}

double choose_step(const Summaries& summ, const ControlPair& ctrl, const EngineConfig& cfg) {
  double activity = 1.0;
  if (summ.w && summ.z_mat && std::abs(*summ.w) > 1.0) {
    const ItoSystemPrediction p = predict_general(ctrl, summ);
    const double w2 = *summ.w * *summ.w;
    activity = std::max(p.qv_k, std::min(1.0, std::max(p.qv_h, 1.0 / w2)));
  }
  return std::min(cfg.dt_max, cfg.dt_scale * summ.v * summ.v / activity);
}

CouplingResult run(const CoupledState& init, Strategy& strategy, const EngineConfig& cfg, Rng& rng,
                   const StepObserver& observer) {
  cfg.validate_against(init);
  strategy.check_dimension(init.dim);

  CouplingResult res;
  CoupledState state = init;
  strategy.prepare(state, rng, cfg);

  if (cfg.record_history) {
    res.history.emplace();
    res.history->a.push_back(state.a_path());
    res.history->b.push_back(state.b_path);
  }

  for (;;) {
    Summaries summ = summarize(state);
    if (state.coupled_flag || (summ.v <= cfg.epsilon_v && std::abs(summ.u) <= cfg.epsilon_u)) {
      clamp_coupled(state);
      res.coupled = true;
      res.t_coupling = state.t_time;
      res.tau_coupling = state.tau_time;
      break;
    }
    if (state.t_time >= cfg.t_max || res.steps >= cfg.step_budget) break;

    ControlPair ctrl;
    double h;
    if (!summ.nu) {
      // Paths met but areas did not: a reflection kick separates them again.
      ctrl = reflection_control(unit_vector(state.dim, 0));
      h = std::min(cfg.dt_max, cfg.dt_scale * std::abs(summ.u));
    } else {
      ctrl = strategy.select(summ);
      h = choose_step(summ, ctrl, cfg);
    }
    h = std::min(h, cfg.t_max - state.t_time);
    if (!(h > 0.0) || state.t_time + h == state.t_time) break;  // horizon reached up to rounding

    const int mode = strategy.mode();
    if (!res.mode_trace.empty() && res.mode_trace.back().mode == mode)
      ++res.mode_trace.back().steps;
    else
      res.mode_trace.push_back({mode, 1});

    if (cfg.snapshot_every > 0 && res.steps % cfg.snapshot_every == 0)
      res.snapshots.push_back(trajectory_csv_row(state, summ, cfg.snapshot_verbose));
    if (observer) observer(state, summ, ctrl, h);

    step(state, ctrl, rng, h);
    ++res.steps;
    if (res.history) {
      res.history->a.push_back(state.a_path());
      res.history->b.push_back(state.b_path);
    }
  }

  res.final_summaries = summarize(state);
  if (cfg.snapshot_every > 0) res.snapshots.push_back(trajectory_csv_row(state, res.final_summaries, cfg.snapshot_verbose));
  res.final_state = std::move(state);
  return res;
}

std::vector<CouplingResult> run_batch(const std::vector<CoupledState>& inits, const Strategy& strategy,
                                      const EngineConfig& cfg, std::uint64_t master_seed, std::size_t n_runs,
                                      unsigned threads) {
  if (n_runs == 0) throw Error(ErrorCode::ConfigInvalid, "n_runs must be at least 1");
  if (inits.empty() || (inits.size() != 1 && inits.size() != n_runs))
    throw Error(ErrorCode::ConfigInvalid, "need one initial state or one per run");
  cfg.validate();
  for (const auto& s : inits) strategy.check_dimension(s.dim);

  std::vector<CouplingResult> results(n_runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_runs) return;
      try {
        Rng rng(derive_run_seed(master_seed, i));
        auto local = strategy.clone();
        results[i] = run(inits.size() == 1 ? inits[0] : inits[i], *local, cfg, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_runs);
      }
    }
  };

  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_runs)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace levycouple
