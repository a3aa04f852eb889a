// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "levycouple/engine.hpp"
#include "levycouple/error.hpp"
#include "test_support.hpp"

using namespace levycouple;
using namespace levycouple::testing;

namespace {

AntisymmetricMatrix planar_z() {
  AntisymmetricMatrix z(2);
  z.set(0, 1, 1.0 / std::sqrt(2.0));
  return z;
}

bool bit_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST(Step, SynchronousKeepsSeparationBitIdentical) {
  Rng rng(1);
  for (std::size_t n = 2; n <= 5; ++n) {
    auto st = random_state(n, rng, 0.5, 3.0);
    const Vector x0 = st.separation;
    const auto ctrl = synchronous_control(n);
    for (int k = 0; k < 10000; ++k) step(st, ctrl, rng, 1e-3);
    EXPECT_TRUE(bit_equal(st.separation, x0));
  }
}

TEST(Step, ReflectionMirrorsFirstCoordinate) {
  auto st = CoupledState::from_positions({1.0, 0.0}, {0.0, 0.0}, AntisymmetricMatrix(2));
  const double h = 0.01;
  Rng rng(42), replay(42);
  const Vector a0 = st.a_path(), b0 = st.b_path;
  step(st, reflection_control(std::vector<double>{1.0, 0.0}), rng, h);
  const double b1 = std::sqrt(h) * replay.gaussian();
  const double b2 = std::sqrt(h) * replay.gaussian();
  const Vector a1 = st.a_path();
  EXPECT_DOUBLE_EQ(st.b_path[0] - b0[0], b1);
  EXPECT_DOUBLE_EQ(st.b_path[1] - b0[1], b2);
  EXPECT_NEAR(a1[0] - a0[0], -b1, 1e-15);
  EXPECT_NEAR(a1[1] - a0[1], b2, 1e-15);
}

TEST(Step, ClocksAdvance) {
  Rng rng(2);
  auto st = random_state(3, rng, 1.0, 2.0);
  const double v0 = norm(st.separation);
  step(st, reflection_control(*summarize(st).nu), rng, 0.003);
  EXPECT_DOUBLE_EQ(st.t_time, 0.003);
  EXPECT_DOUBLE_EQ(st.tau_time, 4.0 * 0.003 / (v0 * v0));

  auto met = CoupledState::from_positions({0, 0}, {0, 0}, planar_z());
  step(met, reflection_control(std::vector<double>{1.0, 0.0}), rng, 0.01);
  EXPECT_EQ(met.tau_time, 0.0);
  EXPECT_DOUBLE_EQ(met.t_time, 0.01);
}

TEST(Step, Errors) {
  Rng rng(3);
  auto st = random_state(2, rng, 1.0, 2.0);
  EXPECT_THROW(step(st, synchronous_control(2), rng, 0.0), Error);
  EXPECT_THROW(step(st, synchronous_control(2), rng, -1.0), Error);
  EXPECT_THROW(step(st, synchronous_control(2), rng, NAN), Error);
  EXPECT_THROW(step(st, synchronous_control(3), rng, 0.1), Error);
}

TEST(Step, IncrementVariancesMatchStep) {
  // Var(dA_i) = Var(dB_i) = h for a control with a complement part.
  Rng rng(4);
  const std::size_t n = 3;
  const auto ctrl = random_admissible_control(n, rng);
  ASSERT_TRUE(ctrl.has_complement);
  const auto init = random_state(n, rng, 1.0, 2.0);
  const double h = 0.25;
  const std::size_t draws = 200000;
  std::vector<double> sa(n, 0.0), sb(n, 0.0);
  for (std::size_t k = 0; k < draws; ++k) {
    auto st = init;
    step(st, ctrl, rng, h);
    const Vector a1 = st.a_path(), a0 = init.a_path();
    for (std::size_t i = 0; i < n; ++i) {
      sa[i] += (a1[i] - a0[i]) * (a1[i] - a0[i]);
      sb[i] += (st.b_path[i] - init.b_path[i]) * (st.b_path[i] - init.b_path[i]);
    }
  }
  const double se = h * std::sqrt(2.0 / static_cast<double>(draws));
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(sa[i] / draws, h, 4.0 * se);
    EXPECT_NEAR(sb[i] / draws, h, 4.0 * se);
  }
}

TEST(Run, MetPairCouplesImmediately) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = CoupledState::from_positions({0.5, 0.5}, {0.5, 0.5}, AntisymmetricMatrix(2));
  Rng rng(1);
  const auto r = run(init, strat, EngineConfig{}, rng);
  EXPECT_TRUE(r.coupled);
  EXPECT_EQ(*r.t_coupling, 0.0);
  EXPECT_EQ(r.steps, 0u);
}

TEST(Run, SynchronousNeverCouples) {
  ConstantControlStrategy strat(synchronous_control(2), "synchronous");
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  EngineConfig cfg;
  cfg.t_max = 10.0;
  Rng rng(1);
  const auto r = run(init, strat, with_default_tolerances(cfg, init), rng);
  EXPECT_FALSE(r.coupled);
  EXPECT_FALSE(r.t_coupling.has_value());
  EXPECT_DOUBLE_EQ(r.final_summaries.v, 1.0);
  EXPECT_DOUBLE_EQ(r.final_state.t_time, 10.0);
}

TEST(Run, PlanarUsuallyCouples) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  EngineConfig cfg;
  cfg.t_max = 1e3;
  const auto res = run_batch({init}, strat, with_default_tolerances(cfg, init), 11, 100, 1);
  const auto coupled = std::count_if(res.begin(), res.end(), [](const auto& r) { return r.coupled; });
  EXPECT_GE(coupled, 85);
  for (const auto& r : res)
    if (r.coupled) {
      EXPECT_EQ(r.final_summaries.v, 0.0);
      EXPECT_EQ(r.final_summaries.u, 0.0);
      EXPECT_TRUE(r.final_state.coupled_flag);
    }
}

TEST(Run, ClocksIncreaseAndTauMatchesLeftPoint) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  EngineConfig cfg;
  cfg.t_max = 5.0;
  double t = -1.0, tau = -1.0;
  std::size_t bad = 0;
  auto observer = [&](const CoupledState& st, const Summaries& s, const ControlPair&, double h) {
    if (st.t_time <= t || st.tau_time < tau) ++bad;
    if (s.v > 0.0 && t >= 0.0 && !(st.tau_time > tau)) ++bad;
    t = st.t_time;
    tau = st.tau_time;
    EXPECT_GT(h, 0.0);
  };
  // Replay each step on a copy to compare the tau increment with 4 h / V^2.
  Rng rng(5);
  const auto r = run(init, strat, with_default_tolerances(cfg, init), rng, observer);
  EXPECT_EQ(bad, 0u);
  EXPECT_GT(r.steps, 100u);

  Rng rng2(6);
  auto st = random_state(2, rng2, 0.5, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double v2 = dot(st.separation, st.separation);
    const double before = st.tau_time;
    const auto s = summarize(st);
    step(st, reflection_control(*s.nu), rng2, 1e-4);
    EXPECT_NEAR(st.tau_time - before, 4e-4 / v2, 1e-12 * (4e-4 / v2));
  }
}

TEST(Run, ModeTraceCountsSteps) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  EngineConfig cfg;
  cfg.t_max = 50.0;
  Rng rng(8);
  const auto r = run(init, strat, with_default_tolerances(cfg, init), rng);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < r.mode_trace.size(); ++i) {
    total += r.mode_trace[i].steps;
    if (i > 0) EXPECT_NE(r.mode_trace[i].mode, r.mode_trace[i - 1].mode);
  }
  EXPECT_EQ(total, r.steps);
}

TEST(Run, HistoryMatchesPolylineArea) {
  AdaptiveMixedStrategy strat(AdaptiveStrategyConfig{}, 3);
  Rng rng(9);
  const auto init = state_from(random_unit(3, rng), 1.0, random_generator(3, rng), 200.0);
  EngineConfig cfg;
  cfg.t_max = 0.5;
  cfg.record_history = true;
  const auto r = run(init, strat, with_default_tolerances(cfg, init), rng);
  ASSERT_TRUE(r.history.has_value());
  EXPECT_EQ(r.history->a.size(), r.steps + 1);
  // The polyline area counts from the recorded start, so add the initial area.
  const auto poly = invariant_area_matrix(r.history->a, r.history->b);
  const auto start = invariant_area_matrix({r.history->a.front()}, {r.history->b.front()});
  const auto diff = r.final_state.area_diff - (init.area_diff + poly - start);
  double rms = 0.0;
  for (double x : diff.upper()) rms += x * x;
  EXPECT_LT(std::sqrt(rms), 0.05 * area_summary(init.area_diff));
}

TEST(Run, InvalidConfigurations) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  Rng rng(1);
  EngineConfig cfg;
  cfg.dt_max = 0.0;
  EXPECT_THROW(run(init, strat, cfg, rng), Error);
  cfg = EngineConfig{};
  cfg.epsilon_v = 0.9;  // not small against V0 = 1
  EXPECT_THROW(run(init, strat, cfg, rng), Error);
  EXPECT_THROW(run(random_state(3, rng, 1, 2), strat, EngineConfig{}, rng), Error);
  EXPECT_THROW(run_batch({init}, strat, EngineConfig{}, 1, 0), Error);
  EXPECT_THROW(run_batch({init, init}, strat, EngineConfig{}, 1, 3), Error);
}

TEST(Batch, ThreadCountDoesNotChangeResults) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  EngineConfig cfg;
  cfg.t_max = 20.0;
  cfg = with_default_tolerances(cfg, init);
  const auto one = run_batch({init}, strat, cfg, 77, 40, 1);
  const auto four = run_batch({init}, strat, cfg, 77, 40, 4);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].coupled, four[i].coupled);
    EXPECT_EQ(one[i].steps, four[i].steps);
    EXPECT_TRUE(bit_equal(one[i].final_state.separation, four[i].final_state.separation));
    EXPECT_EQ(one[i].final_state.t_time, four[i].final_state.t_time);
  }
}

TEST(Batch, SingleRunMatchesDerivedSeed) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  EngineConfig cfg;
  cfg.t_max = 20.0;
  cfg = with_default_tolerances(cfg, init);
  const auto batch = run_batch({init}, strat, cfg, 123, 1);
  Rng rng(derive_run_seed(123, 0));
  auto local = strat.clone();
  const auto single = run(init, *local, cfg, rng);
  EXPECT_EQ(batch[0].steps, single.steps);
  EXPECT_TRUE(bit_equal(batch[0].final_state.separation, single.final_state.separation));
}

TEST(Batch, DifferentSeedsAgreeWithinBinomialNoise) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  EngineConfig cfg;
  cfg.t_max = 3.0;
  cfg = with_default_tolerances(cfg, init);
  auto fraction = [&](std::uint64_t seed) {
    const auto res = run_batch({init}, strat, cfg, seed, 400);
    return static_cast<double>(std::count_if(res.begin(), res.end(), [](const auto& r) { return r.coupled; })) /
           400.0;
  };
  const double p1 = fraction(1), p2 = fraction(2);
  const double p = 0.5 * (p1 + p2);
  EXPECT_GT(p, 0.05);
  EXPECT_LT(std::abs(p1 - p2), 4.0 * std::sqrt(2.0 * p * (1.0 - p) / 400.0));
}

TEST(Batch, BrownianMarginalsUnderMixedControl) {
  // Each coordinate of A and B has variance t at a fixed time, whatever the control.
  AdaptiveMixedStrategy strat(AdaptiveStrategyConfig{}, 3);
  Rng rng(12);
  const auto init = state_from(random_unit(3, rng), 1.0, random_generator(3, rng), 100.0);
  EngineConfig cfg;
  cfg.t_max = 0.02;
  cfg.dt_max = 2e-3;
  cfg = with_default_tolerances(cfg, init);
  const std::size_t runs = 100000;
  const auto res = run_batch({init}, strat, cfg, 99, runs);
  const Vector a0 = init.a_path();
  std::vector<double> sa(3, 0.0), sb(3, 0.0);
  for (const auto& r : res) {
    ASSERT_FALSE(r.coupled);
    const Vector a = r.final_state.a_path();
    for (std::size_t i = 0; i < 3; ++i) {
      sa[i] += (a[i] - a0[i]) * (a[i] - a0[i]);
      sb[i] += (r.final_state.b_path[i] - init.b_path[i]) * (r.final_state.b_path[i] - init.b_path[i]);
    }
  }
  const double t = cfg.t_max;
  const double se = t * std::sqrt(2.0 / static_cast<double>(runs));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(sa[i] / runs, t, 4.0 * se);
    EXPECT_NEAR(sb[i] / runs, t, 4.0 * se);
  }
}

TEST(Batch, HalvingStepKeepsMedianCouplingTime) {
  PlanarDowncrossingStrategy strat({1.0, 0.1});
  const auto init = state_from({1.0, 0.0}, 1.0, AntisymmetricMatrix(2), 0.0);
  auto medians = [&](double dt_max) {
    EngineConfig cfg;
    cfg.t_max = 100.0;
    cfg.dt_max = dt_max;
    const auto res = run_batch({init}, strat, with_default_tolerances(cfg, init), 31, 300);
    std::vector<double> t;
    for (const auto& r : res) t.push_back(r.coupled ? *r.t_coupling : INFINITY);
    return t;
  };
  const auto coarse = medians(2e-3), fine = medians(1e-3);
  const double m1 = median(coarse), m2 = median(fine);
  // Distribution-free 95% band for the median of 300 draws: order statistics 133 and 167.
  auto band = [](std::vector<double> t) {
    std::sort(t.begin(), t.end());
    return t[166] - t[132];
  };
  EXPECT_LT(std::abs(m1 - m2), std::max(band(coarse), band(fine)));
}
