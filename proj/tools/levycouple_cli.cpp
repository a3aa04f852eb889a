// SPDX-License-Identifier: Apache-2.0
//
// levycouple simulate | verify
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "levycouple/levycouple.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalidSpec = 2;
constexpr int kExitIo = 3;
constexpr int kExitVerification = 4;

int exit_code(lvc_status s) {
  switch (s) {
    case LVC_OK: return kExitOk;
    case LVC_INVALID_SPEC:
    case LVC_INVALID_ARGUMENT: return kExitInvalidSpec;
    case LVC_IO_ERROR: return kExitIo;
    case LVC_VERIFICATION_FAILED: return kExitVerification;
    default: return kExitFailure;
  }
}

int report(lvc_status s) {
  std::fprintf(stderr, "levycouple: %s: %s\n", lvc_status_string(s), lvc_last_error());
  return exit_code(s);
}

template <class T>
void put(nlohmann::ordered_json& obj, const char* key, const std::optional<T>& v) {
  if (v) obj[key] = *v;
}

struct SimulateArgs {
  std::optional<std::size_t> dim;
  std::string strategy = "planar-downcrossing";
  std::optional<double> kappa, epsilon, mu_k, mu_h, w_threshold, w0;
  std::optional<double> v0, u0, dt_max, dt_scale, t_max, eps_v, eps_u;
  std::optional<std::uint64_t> step_budget;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";
  std::string trajectory_out;
  std::uint64_t snapshot_every = 0;
  bool verbose_trajectory = false;
};

struct VerifyArgs {
  std::string control;
  std::size_t dim = 2;
  std::size_t samples = 100000;
  double h = 1e-4;
  std::uint64_t seed = 0;
  std::optional<double> w, mu_k, mu_h;
  std::string out;
};

std::string simulate_spec(const SimulateArgs& a) {
  nlohmann::ordered_json j;
  const bool planar = a.strategy == "planar-downcrossing";
  j["dim"] = a.dim.value_or(planar ? 2 : 3);
  j["strategy"] = a.strategy;
  if (planar) {
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    put(p, "kappa", a.kappa);
    put(p, "epsilon", a.epsilon);
    j["planar"] = p;
  } else {
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    put(p, "mu_k", a.mu_k);
    put(p, "mu_h", a.mu_h);
    put(p, "w_threshold", a.w_threshold);
    if (a.w0) {
      p["prep_enabled"] = true;
      p["w0"] = *a.w0;
    }
    j["adaptive"] = p;
  }
  nlohmann::ordered_json init = nlohmann::ordered_json::object();
  put(init, "v0", a.v0);
  put(init, "u0", a.u0);
  j["initial"] = init;
  nlohmann::ordered_json e = nlohmann::ordered_json::object();
  put(e, "dt_max", a.dt_max);
  put(e, "dt_scale", a.dt_scale);
  put(e, "t_max", a.t_max);
  put(e, "epsilon_v", a.eps_v);
  put(e, "epsilon_u", a.eps_u);
  put(e, "step_budget", a.step_budget);
  if (!a.trajectory_out.empty()) {
    e["snapshot_every"] = a.snapshot_every ? a.snapshot_every : 1000;
    e["snapshot_verbose"] = a.verbose_trajectory;
  }
  j["engine"] = e;
  j["runs"] = a.runs;
  j["seed"] = a.seed;
  return j.dump();
}

int run_simulate(const SimulateArgs& a) {
  if (a.strategy != "planar-downcrossing" && (a.kappa || a.epsilon)) {
    std::fprintf(stderr, "levycouple: --kappa/--epsilon apply only to planar-downcrossing\n");
    return kExitInvalidSpec;
  }
  if (a.strategy == "planar-downcrossing" && (a.mu_k || a.mu_h || a.w_threshold || a.w0)) {
    std::fprintf(stderr, "levycouple: --mu-k/--mu-h/--w-threshold/--w0 apply only to adaptive-mixed\n");
    return kExitInvalidSpec;
  }
  lvc_simulation* sim = nullptr;
  lvc_status s = lvc_simulation_create(simulate_spec(a).c_str(), &sim);
  if (s != LVC_OK) return report(s);

  int code = kExitOk;
  if ((s = lvc_simulation_run(sim, a.threads)) != LVC_OK) {
    code = report(s);
  } else {
    if (a.format == "csv") {
      s = lvc_simulation_write_csv(sim, a.out.c_str());
      if (s == LVC_OK) s = lvc_simulation_write_sidecar(sim, (a.out + ".json").c_str());
    } else {
      s = lvc_simulation_write_json(sim, a.out.c_str());
    }
    if (s == LVC_OK && !a.trajectory_out.empty()) s = lvc_simulation_write_trajectories(sim, a.trajectory_out.c_str());
    if (s != LVC_OK) {
      code = report(s);
    } else {
      std::size_t runs = 0;
      double fraction = 0.0;
      lvc_simulation_run_count(sim, &runs);
      lvc_simulation_coupling_fraction(sim, &fraction);
      std::printf("runs=%zu coupling_fraction=%.6g\n", runs, fraction);
    }
  }
  lvc_simulation_destroy(sim);
  return code;
}

int run_verify(const VerifyArgs& a) {
  nlohmann::ordered_json j;
  j["control"] = a.control;
  j["dim"] = a.dim;
  j["samples"] = a.samples;
  j["h"] = a.h;
  j["seed"] = a.seed;
  put(j, "w", a.w);
  put(j, "mu_k", a.mu_k);
  put(j, "mu_h", a.mu_h);

  lvc_verification* ver = nullptr;
  lvc_status s = lvc_verification_create(j.dump().c_str(), &ver);
  if (s != LVC_OK) return report(s);
  int passed = 0;
  int code = kExitOk;
  if ((s = lvc_verification_run(ver, &passed)) != LVC_OK) {
    code = report(s);
  } else {
    if (a.out.empty()) {
      const char* text = nullptr;
      lvc_verification_report_json(ver, &text);
      std::fputs(text, stdout);
    } else if ((s = lvc_verification_write_report(ver, a.out.c_str())) != LVC_OK) {
      code = report(s);
    }
    if (code == kExitOk && !passed) {
      std::fprintf(stderr, "levycouple: verification failed for control '%s'\n", a.control.c_str());
      code = kExitVerification;
    }
  }
  lvc_verification_destroy(ver);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-adapted couplings of Brownian motion with its stochastic areas"};
  app.set_version_flag("--version", std::string(lvc_version()));
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run a batch of coupling simulations");
  sim->add_option("--dim", sa.dim, "Dimension (default 2 for planar, 3 for adaptive)");
  sim->add_option("--strategy", sa.strategy, "Coupling strategy")
      ->check(CLI::IsMember({"planar-downcrossing", "adaptive-mixed"}))
      ->capture_default_str();
  sim->add_option("--kappa", sa.kappa, "Planar: upper W level (default 1)");
  sim->add_option("--epsilon", sa.epsilon, "Planar: hysteresis width (default 0.1)");
  sim->add_option("--mu-k", sa.mu_k, "Adaptive: target decay rate of log V (default 0.5)");
  sim->add_option("--mu-h", sa.mu_h, "Adaptive: target decay rate of log U (default 0.6)");
  sim->add_option("--w-threshold", sa.w_threshold, "Adaptive: W above which the mixed control is used (default 50)");
  sim->add_option("--w0", sa.w0, "Adaptive: run synchronously until W reaches this level first");
  sim->add_option("--v0", sa.v0, "Initial |A - B| (default 1)");
  sim->add_option("--u0", sa.u0, "Initial area summary (default 0)");
  sim->add_option("--dt-max", sa.dt_max, "Largest time step (default 1e-3)");
  sim->add_option("--dt-scale", sa.dt_scale, "Step factor on V^2 (default 0.01)");
  sim->add_option("--t-max", sa.t_max, "Time horizon (default 1000)");
  sim->add_option("--eps-v", sa.eps_v, "Coupling tolerance on V (default 1e-4 V0)");
  sim->add_option("--eps-u", sa.eps_u, "Coupling tolerance on |U| (default 1e-4 max(|U0|, V0^2))");
  sim->add_option("--step-budget", sa.step_budget, "Maximum steps per run");
  sim->add_option("--runs", sa.runs, "Number of runs")->capture_default_str();
  sim->add_option("--seed", sa.seed, "Master seed")->required();
  sim->add_option("--threads", sa.threads, "Worker threads")->capture_default_str();
  sim->add_option("--out", sa.out, "Output path; CSV also writes <out>.json")->required();
  sim->add_option("--format", sa.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sim->add_option("--trajectory-out", sa.trajectory_out, "Write trajectory snapshots to this CSV");
  sim->add_option("--snapshot-every", sa.snapshot_every, "Steps between snapshots (default 1000)");
  sim->add_flag("--verbose-trajectory", sa.verbose_trajectory, "Include A and B coordinates in snapshots");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Check empirical rates of one control against the closed forms");
  ver->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  ver->add_option("--control", va.control, "Control name")
      ->required()
      ->check(CLI::IsMember({"reflection", "synchronous", "rotation", "rotated-reflection", "mixed"}));
  ver->add_option("--dim", va.dim, "Dimension")->capture_default_str();
  ver->add_option("--samples", va.samples, "Monte Carlo samples")->capture_default_str();
  ver->add_option("--h", va.h, "Step size")->capture_default_str();
  ver->add_option("--seed", va.seed, "Seed")->required();
  ver->add_option("--w", va.w, "W at the test state (default 100 for mixed, 10 otherwise)");
  ver->add_option("--mu-k", va.mu_k, "Mixed control: mu_K (default 0.5)");
  ver->add_option("--mu-h", va.mu_h, "Mixed control: mu_H (default 0.6)");
  ver->add_option("--out", va.out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidSpec;
  }

  if (sim->parsed()) return run_simulate(sa);
  return run_verify(va);
}
