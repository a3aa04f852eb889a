// SPDX-License-Identifier: Apache-2.0
//
// Discrete-time simulation of a coupled pair under a strategy.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levycouple/controls.hpp"
#include "levycouple/rng.hpp"
#include "levycouple/state.hpp"
#include "levycouple/strategies.hpp"

namespace levycouple {

struct EngineConfig {
  double dt_max = 1e-3;
  // Step size is min(dt_max, dt_scale * V^2 / activity); see choose_step.
  double dt_scale = 0.01;
  double t_max = 1e3;
  double epsilon_v = 1e-4;
  double epsilon_u = 1e-4;
  bool record_history = false;
  std::uint64_t step_budget = 100'000'000;
  // Record a trajectory snapshot every this many steps (0 disables).
  std::uint64_t snapshot_every = 0;
  bool snapshot_verbose = false;

  void validate() const;
  // Additionally rejects coupling tolerances that are not small against the
  // initial separation and area.
  void validate_against(const CoupledState& init) const;
};

// Default tolerances relative to an initial state:
// 1e-4 V0 and 1e-4 max(|U0|, V0^2).
EngineConfig with_default_tolerances(EngineConfig cfg, const CoupledState& init);

struct ModeRun {
  int mode = 0;
  std::uint64_t steps = 0;
};

struct PathHistory {
  std::vector<Vector> a;
  std::vector<Vector> b;
};

struct CouplingResult {
  bool coupled = false;
  std::optional<double> t_coupling;
  std::optional<double> tau_coupling;
  std::uint64_t steps = 0;
  Summaries final_summaries;
  CoupledState final_state;
  std::vector<ModeRun> mode_trace;
  std::optional<PathHistory> history;
  std::vector<std::string> snapshots;  // CSV rows, see trajectory_csv_row
};

// Called before every step with the state at the step start, its summaries,
// the chosen control and step size.
using StepObserver = std::function<void(const CoupledState&, const Summaries&, const ControlPair&, double)>;

// One Euler step: dB, dC ~ N(0, h I) independent; dA = J^T dB + Jt^T dC.
// Updates B, X = A - B, the area matrix, t += h and tau += 4 h / V^2 (V at the
// step start; tau is left unchanged while V = 0).
void step(CoupledState& state, const ControlPair& ctrl, Rng& rng, double h);

// Step size for the next step. The base rule is min(dt_max, dt_scale V^2);
// when |W| > 1 the V^2 budget is divided by the control's activity
//   max(qv_K, min(1, max(qv_H, 1 / W^2)))
// so that the per-step change of log V and log U stays at the same scale
// when everything moves at rate 1 / W^2 on the tau clock.
double choose_step(const Summaries& summ, const ControlPair& ctrl, const EngineConfig& cfg);

CouplingResult run(const CoupledState& init, Strategy& strategy, const EngineConfig& cfg, Rng& rng,
                   const StepObserver& observer = {});

// Runs n_runs independent copies. Run i uses Rng(derive_run_seed(master_seed, i))
// and inits[i] (or inits[0] when a single initial state is given). Results are
// in run-index order and identical for any thread count.
std::vector<CouplingResult> run_batch(const std::vector<CoupledState>& inits, const Strategy& strategy,
                                      const EngineConfig& cfg, std::uint64_t master_seed, std::size_t n_runs,
                                      unsigned threads = 1);

}  // namespace levycouple
