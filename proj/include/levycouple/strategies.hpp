// SPDX-License-Identifier: Apache-2.0
//
// Coupling strategies: rules that pick a control from the current summaries.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "levycouple/controls.hpp"
#include "levycouple/state.hpp"

namespace levycouple {

class Rng;
struct EngineConfig;

// Down-crossing rule for the plane: reflect until W^2 reaches kappa^2, then
// run synchronously until W^2 falls back to (kappa - epsilon)^2.
struct PlanarStrategyConfig {
  double kappa = 1.0;
  double epsilon = 0.1;

  void validate() const;
};

enum class PlanarMode : int { Reflect = 0, Synch = 1 };

struct PlanarChoice {
  ControlPair control;
  PlanarMode mode;
};

PlanarChoice planar_select(const Summaries& summ, PlanarMode mode, const PlanarStrategyConfig& cfg);

// Mixed reflection/rotation control above a W threshold, synchronous below it.
struct AdaptiveStrategyConfig {
  double mu_k = 0.5;
  double mu_h = 0.6;
  double w_threshold = 50.0;
  bool prep_enabled = false;
  double w0 = 0.0;  // preparation target for W when prep_enabled

  // Requires 0 < mu_k < mu_h < 2 mu_k and w_threshold^2 above the mixed threshold.
  void validate(std::size_t dim) const;
};

enum class AdaptiveRegime : int { Mixed = 0, Synch = 1 };

struct AdaptiveChoice {
  ControlPair control;
  AdaptiveRegime regime;
};

AdaptiveChoice adaptive_select(const Summaries& summ, const AdaptiveStrategyConfig& cfg);

// Interface used by the engine. Instances carry per-run mode state, so a
// batch clones one per run.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual std::unique_ptr<Strategy> clone() const = 0;
  virtual std::string name() const = 0;
  virtual void check_dimension(std::size_t dim) const = 0;
  // Called once before the first step; may advance the state with its own steps.
  virtual void prepare(CoupledState& /*state*/, Rng& /*rng*/, const EngineConfig& /*cfg*/) {}
  // Requires V > 0.
  virtual ControlPair select(const Summaries& summ) = 0;
  virtual int mode() const { return 0; }
  virtual std::string_view mode_name(int /*mode*/) const { return "fixed"; }
};

class PlanarDowncrossingStrategy final : public Strategy {
 public:
  explicit PlanarDowncrossingStrategy(PlanarStrategyConfig cfg);

  std::unique_ptr<Strategy> clone() const override;
  std::string name() const override { return "planar-downcrossing"; }
  void check_dimension(std::size_t dim) const override;
  void prepare(CoupledState& state, Rng& rng, const EngineConfig& cfg) override;
  ControlPair select(const Summaries& summ) override;
  int mode() const override { return static_cast<int>(mode_); }
  std::string_view mode_name(int mode) const override;

  const PlanarStrategyConfig& config() const noexcept { return cfg_; }

 private:
  PlanarStrategyConfig cfg_;
  PlanarMode mode_ = PlanarMode::Reflect;
};

class AdaptiveMixedStrategy final : public Strategy {
 public:
  AdaptiveMixedStrategy(AdaptiveStrategyConfig cfg, std::size_t dim);

  std::unique_ptr<Strategy> clone() const override;
  std::string name() const override { return "adaptive-mixed"; }
  void check_dimension(std::size_t dim) const override;
  void prepare(CoupledState& state, Rng& rng, const EngineConfig& cfg) override;
  ControlPair select(const Summaries& summ) override;
  int mode() const override { return static_cast<int>(regime_); }
  std::string_view mode_name(int mode) const override;

  const AdaptiveStrategyConfig& config() const noexcept { return cfg_; }

 private:
  AdaptiveStrategyConfig cfg_;
  AdaptiveRegime regime_ = AdaptiveRegime::Synch;
};

// Reflection about the current separation direction, every step.
class ReflectionStrategy final : public Strategy {
 public:
  std::unique_ptr<Strategy> clone() const override { return std::make_unique<ReflectionStrategy>(*this); }
  std::string name() const override { return "reflection"; }
  void check_dimension(std::size_t dim) const override;
  ControlPair select(const Summaries& summ) override;
};

// The same control matrix at every step (synchronous, or a frozen rotation).
class ConstantControlStrategy final : public Strategy {
 public:
  explicit ConstantControlStrategy(ControlPair ctrl, std::string label = "constant")
      : ctrl_(std::move(ctrl)), label_(std::move(label)) {}

  std::unique_ptr<Strategy> clone() const override { return std::make_unique<ConstantControlStrategy>(*this); }
  std::string name() const override { return label_; }
  void check_dimension(std::size_t dim) const override;
  ControlPair select(const Summaries& /*summ*/) override { return ctrl_; }

 private:
  ControlPair ctrl_;
  std::string label_;
};

// Reflection to make V positive, then synchronous coupling until |U| drops
// to the engine's epsilon_u, after which the area matrix is set to zero.
// A state with V = 0 and U = 0 comes back flagged as coupled.
void planar_prepare(CoupledState& state, Rng& rng, const EngineConfig& cfg);

// Synchronous coupling (after a reflection kick when V = 0) until W >= w0.
void adaptive_prepare(CoupledState& state, double w0, Rng& rng, const EngineConfig& cfg);

}  // namespace levycouple
