// SPDX-License-Identifier: Apache-2.0
//
// Experiment descriptions shared by the C API and the command line tool:
// batch simulations and single-control rate verification, with their
// serialized outputs.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levycouple/engine.hpp"
#include "levycouple/strategies.hpp"
#include "levycouple/verify.hpp"

namespace levycouple {

inline constexpr std::string_view kCsvSchema = "levycouple.runs.v1";
inline constexpr std::string_view kSidecarSchema = "levycouple.simulate.v1";
inline constexpr std::string_view kVerifySchema = "levycouple.verify.v1";

const char* library_version() noexcept;

struct ExperimentSpec {
  std::size_t dim = 2;
  std::string strategy = "planar-downcrossing";  // or adaptive-mixed
  PlanarStrategyConfig planar;
  AdaptiveStrategyConfig adaptive;

  // Initial condition: B0 = 0, A0 = v0 e1 and area u0 (e1 e2^T - e2 e1^T) / sqrt2,
  // unless explicit positions are given.
  double v0 = 1.0;
  double u0 = 0.0;
  std::optional<Vector> a0;
  std::optional<Vector> b0;
  std::optional<AntisymmetricMatrix> area0;

  EngineConfig engine;
  // Coupling tolerances; default to 1e-4 V0 and 1e-4 max(|U0|, V0^2).
  std::optional<double> epsilon_v;
  std::optional<double> epsilon_u;

  std::size_t runs = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;  // not part of the reproducibility record

  void validate() const;  // ConfigInvalid / WrongDimension
  CoupledState initial_state() const;
  EngineConfig resolved_engine() const;
  std::unique_ptr<Strategy> make_strategy() const;
};

std::string spec_to_json(const ExperimentSpec& spec);
// Missing fields keep their defaults. Unknown fields are rejected.
ExperimentSpec spec_from_json(std::string_view text);

struct SimulationOutput {
  ExperimentSpec spec;
  std::vector<CouplingResult> results;
};

SimulationOutput simulate(const ExperimentSpec& spec);

// run_index,coupled,t_coupling,tau_coupling,steps,final_v,final_u; absent
// coupling times are empty fields.
std::string results_csv(const std::vector<CouplingResult>& results);
// Resolved spec, version, seed-split version and summary statistics.
std::string summary_json(const SimulationOutput& out);
// All runs and the summary in one document.
std::string results_json(const SimulationOutput& out);
// Snapshot rows of every run prefixed with run_index; empty when snapshots are off.
std::string trajectories_csv(const SimulationOutput& out);

struct CouplingSummary {
  std::size_t runs = 0;
  std::size_t coupled = 0;
  double coupling_fraction = 0.0;
  std::optional<double> t_q25, t_median, t_q75;
  std::optional<double> tau_q25, tau_median, tau_q75;
};

CouplingSummary summarize_results(const std::vector<CouplingResult>& results);

// Linear-interpolation quantile of sorted data, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

struct VerifyRequest {
  std::string control = "reflection";
  std::size_t dim = 2;
  std::size_t samples = 100000;
  double h = 1e-4;
  std::uint64_t seed = 0;
  std::optional<double> w;  // W at the test state; 100 for mixed, 10 otherwise
  double mu_k = 0.5;
  double mu_h = 0.6;
  double n_se = 4.0;

  void validate() const;
};

std::string verify_request_to_json(const VerifyRequest& req);
VerifyRequest verify_request_from_json(std::string_view text);

struct VerifyReport {
  VerifyRequest request;
  CoupledState state;
  Summaries summaries;
  std::vector<RateCheck> general;  // against predict_general
  std::vector<RateCheck> planar;   // against predict_planar, dimension 2 only
  ZnuBoundReport znu;
  std::optional<RotatedReflectionBoundReport> inequality;  // rotated-reflection only
  double complement_residual = 0.0;
  bool passed = false;
};

// Builds a random state at the requested W from the seed, the named control
// at that state, and compares estimate_rates with the closed forms.
VerifyReport run_verification(const VerifyRequest& req);
std::string verify_report_json(const VerifyReport& report);

}  // namespace levycouple
