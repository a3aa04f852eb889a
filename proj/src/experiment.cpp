// SPDX-License-Identifier: Apache-2.0
#include "levycouple/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "json.hpp"
#include "levycouple/error.hpp"
#include "levycouple/ito_rates.hpp"

namespace levycouple {

using Json = nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

// Reads an object, rejecting keys outside `allowed`.
void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) invalid(std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    if (!known) invalid(std::string("unknown field '") + item.key() + "' in " + where);
  }
}

template <class T>
void read(const Json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

void read_opt(const Json& obj, const char* key, std::optional<double>& out) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  double v = 0.0;
  read(obj, key, v);
  out = v;
}

Json area_to_json(const AntisymmetricMatrix& a) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < a.dim(); ++j) row.push_back(a(i, j));
    rows.push_back(row);
  }
  return rows;
}

AntisymmetricMatrix area_from_json(const Json& j) {
  std::vector<std::vector<double>> rows;
  try {
    rows = j.get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception&) {
    invalid("area0 must be a square array of numbers");
  }
  for (const auto& r : rows)
    if (r.size() != rows.size()) invalid("area0 must be square");
  if (rows.size() < 2) invalid("area0 must be at least 2 x 2");
  return AntisymmetricMatrix::from_dense(Matrix::from_rows(rows), 1e-12);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

Json spec_json(const ExperimentSpec& s) {
  Json j;
  j["dim"] = s.dim;
  j["strategy"] = s.strategy;
  if (s.strategy == "planar-downcrossing") {
    j["planar"] = {{"kappa", s.planar.kappa}, {"epsilon", s.planar.epsilon}};
  } else {
    j["adaptive"] = {{"mu_k", s.adaptive.mu_k},
                     {"mu_h", s.adaptive.mu_h},
                     {"w_threshold", s.adaptive.w_threshold},
                     {"prep_enabled", s.adaptive.prep_enabled},
                     {"w0", s.adaptive.w0}};
  }
  Json init;
  if (s.a0) {
    init["a0"] = *s.a0;
    init["b0"] = *s.b0;
    init["area0"] = area_to_json(*s.area0);
  } else {
    init["v0"] = s.v0;
    init["u0"] = s.u0;
  }
  j["initial"] = init;
  j["engine"] = {{"dt_max", s.engine.dt_max},
                 {"dt_scale", s.engine.dt_scale},
                 {"t_max", s.engine.t_max},
                 {"epsilon_v", optional_number(s.epsilon_v)},
                 {"epsilon_u", optional_number(s.epsilon_u)},
                 {"step_budget", s.engine.step_budget},
                 {"snapshot_every", s.engine.snapshot_every},
                 {"snapshot_verbose", s.engine.snapshot_verbose}};
  j["runs"] = s.runs;
  j["seed"] = s.seed;
  return j;
}

Json summary_to_json(const CouplingSummary& c) {
  return {{"runs", c.runs},
          {"coupled", c.coupled},
          {"coupling_fraction", c.coupling_fraction},
          {"t_coupling_quartiles", {optional_number(c.t_q25), optional_number(c.t_median), optional_number(c.t_q75)}},
          {"tau_coupling_quartiles",
           {optional_number(c.tau_q25), optional_number(c.tau_median), optional_number(c.tau_q75)}}};
}

Json checks_to_json(const std::vector<RateCheck>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks)
    arr.push_back({{"rate", c.name},
                   {"predicted", c.predicted},
                   {"empirical", c.empirical},
                   {"se", c.se},
                   {"pass", c.pass}});
  return arr;
}

}  // namespace

const char* library_version() noexcept { return LEVYCOUPLE_VERSION; }

// ---------------------------------------------------------------- simulate

void ExperimentSpec::validate() const {
  if (strategy == "planar-downcrossing") {
    if (dim != 2) throw Error(ErrorCode::WrongDimension, "planar-downcrossing requires dim = 2");
    planar.validate();
  } else if (strategy == "adaptive-mixed") {
    if (dim < 3) throw Error(ErrorCode::WrongDimension, "adaptive-mixed requires dim >= 3");
    adaptive.validate(dim);
  } else {
    invalid("unknown strategy '" + strategy + "'");
  }
  if (runs == 0) invalid("runs must be at least 1");
  if (threads == 0) invalid("threads must be at least 1");
  if (a0 || b0 || area0) {
    if (!a0 || !b0 || !area0) invalid("explicit initial state needs a0, b0 and area0");
    if (a0->size() != dim || b0->size() != dim || area0->dim() != dim)
      invalid("explicit initial state must match dim");
  } else {
    if (!finite_nonneg(v0)) invalid("v0 must be finite and non-negative");
    if (!std::isfinite(u0)) invalid("u0 must be finite");
  }
  const CoupledState init = initial_state();
  resolved_engine().validate_against(init);
}

CoupledState ExperimentSpec::initial_state() const {
  if (a0 && b0 && area0) return CoupledState::from_positions(*a0, *b0, *area0);
  if (dim < 2) throw Error(ErrorCode::WrongDimension, "dimension must be at least 2");
  Vector a(dim, 0.0), b(dim, 0.0);
  a[0] = v0;
  AntisymmetricMatrix area(dim);
  area.set(0, 1, u0 / std::numbers::sqrt2);
  return CoupledState::from_positions(a, b, area);
}

EngineConfig ExperimentSpec::resolved_engine() const {
  EngineConfig cfg = with_default_tolerances(engine, initial_state());
  if (epsilon_v) cfg.epsilon_v = *epsilon_v;
  if (epsilon_u) cfg.epsilon_u = *epsilon_u;
  return cfg;
}

std::unique_ptr<Strategy> ExperimentSpec::make_strategy() const {
  if (strategy == "planar-downcrossing") return std::make_unique<PlanarDowncrossingStrategy>(planar);
  if (strategy == "adaptive-mixed") return std::make_unique<AdaptiveMixedStrategy>(adaptive, dim);
  invalid("unknown strategy '" + strategy + "'");
}

std::string spec_to_json(const ExperimentSpec& spec) { return spec_json(spec).dump(2); }

ExperimentSpec spec_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("spec is not valid JSON: ") + e.what());
  }
  check_keys(j, {"dim", "strategy", "planar", "adaptive", "initial", "engine", "runs", "seed"}, "spec");
  ExperimentSpec s;
  read(j, "dim", s.dim);
  read(j, "strategy", s.strategy);
  read(j, "runs", s.runs);
  read(j, "seed", s.seed);
  if (j.contains("planar")) {
    const Json& p = j.at("planar");
    check_keys(p, {"kappa", "epsilon"}, "planar");
    read(p, "kappa", s.planar.kappa);
    read(p, "epsilon", s.planar.epsilon);
  }
  if (j.contains("adaptive")) {
    const Json& a = j.at("adaptive");
    check_keys(a, {"mu_k", "mu_h", "w_threshold", "prep_enabled", "w0"}, "adaptive");
    read(a, "mu_k", s.adaptive.mu_k);
    read(a, "mu_h", s.adaptive.mu_h);
    read(a, "w_threshold", s.adaptive.w_threshold);
    read(a, "prep_enabled", s.adaptive.prep_enabled);
    read(a, "w0", s.adaptive.w0);
  }
  if (j.contains("initial")) {
    const Json& i = j.at("initial");
    check_keys(i, {"v0", "u0", "a0", "b0", "area0"}, "initial");
    read(i, "v0", s.v0);
    read(i, "u0", s.u0);
    if (i.contains("a0")) {
      Vector v;
      read(i, "a0", v);
      s.a0 = v;
    }
    if (i.contains("b0")) {
      Vector v;
      read(i, "b0", v);
      s.b0 = v;
    }
    if (i.contains("area0")) s.area0 = area_from_json(i.at("area0"));
  }
  if (j.contains("engine")) {
    const Json& e = j.at("engine");
    check_keys(e,
               {"dt_max", "dt_scale", "t_max", "epsilon_v", "epsilon_u", "step_budget", "snapshot_every",
                "snapshot_verbose"},
               "engine");
    read(e, "dt_max", s.engine.dt_max);
    read(e, "dt_scale", s.engine.dt_scale);
    read(e, "t_max", s.engine.t_max);
    read_opt(e, "epsilon_v", s.epsilon_v);
    read_opt(e, "epsilon_u", s.epsilon_u);
    read(e, "step_budget", s.engine.step_budget);
    read(e, "snapshot_every", s.engine.snapshot_every);
    read(e, "snapshot_verbose", s.engine.snapshot_verbose);
  }
  return s;
}

SimulationOutput simulate(const ExperimentSpec& spec) {
  spec.validate();
  SimulationOutput out;
  out.spec = spec;
  const EngineConfig cfg = spec.resolved_engine();
  out.spec.epsilon_v = cfg.epsilon_v;
  out.spec.epsilon_u = cfg.epsilon_u;
  const auto strategy = spec.make_strategy();
  out.results = run_batch({spec.initial_state()}, *strategy, cfg, spec.seed, spec.runs, spec.threads);
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) invalid("quantile of empty data");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

CouplingSummary summarize_results(const std::vector<CouplingResult>& results) {
  CouplingSummary c;
  c.runs = results.size();
  std::vector<double> t, tau;
  for (const auto& r : results) {
    if (!r.coupled) continue;
    ++c.coupled;
    t.push_back(*r.t_coupling);
    tau.push_back(*r.tau_coupling);
  }
  c.coupling_fraction = c.runs ? static_cast<double>(c.coupled) / static_cast<double>(c.runs) : 0.0;
  if (!t.empty()) {
    std::sort(t.begin(), t.end());
    std::sort(tau.begin(), tau.end());
    c.t_q25 = quantile_sorted(t, 0.25);
    c.t_median = quantile_sorted(t, 0.5);
    c.t_q75 = quantile_sorted(t, 0.75);
    c.tau_q25 = quantile_sorted(tau, 0.25);
    c.tau_median = quantile_sorted(tau, 0.5);
    c.tau_q75 = quantile_sorted(tau, 0.75);
  }
  return c;
}

std::string results_csv(const std::vector<CouplingResult>& results) {
  std::string out = "run_index,coupled,t_coupling,tau_coupling,steps,final_v,final_u\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out += std::to_string(i);
    out += r.coupled ? ",1," : ",0,";
    if (r.t_coupling) out += fmt(*r.t_coupling);
    out += ',';
    if (r.tau_coupling) out += fmt(*r.tau_coupling);
    out += ',';
    out += std::to_string(r.steps);
    out += ',';
    out += fmt(r.final_summaries.v);
    out += ',';
    out += fmt(r.final_summaries.u);
    out += '\n';
  }
  return out;
}

std::string summary_json(const SimulationOutput& out) {
  Json j;
  j["schema"] = kSidecarSchema;
  j["csv_schema"] = kCsvSchema;
  j["version"] = library_version();
  j["seed_split_version"] = kSeedSplitVersion;
  j["seed_split_rule"] = "splitmix64(splitmix64(seed) ^ run_index)";
  j["spec"] = spec_json(out.spec);
  j["summary"] = summary_to_json(summarize_results(out.results));
  return j.dump(2) + "\n";
}

std::string results_json(const SimulationOutput& out) {
  Json j;
  j["schema"] = kSidecarSchema;
  j["version"] = library_version();
  j["seed_split_version"] = kSeedSplitVersion;
  j["spec"] = spec_json(out.spec);
  j["summary"] = summary_to_json(summarize_results(out.results));
  Json runs = Json::array();
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    const auto& r = out.results[i];
    runs.push_back({{"run_index", i},
                    {"coupled", r.coupled},
                    {"t_coupling", optional_number(r.t_coupling)},
                    {"tau_coupling", optional_number(r.tau_coupling)},
                    {"steps", r.steps},
                    {"final_v", r.final_summaries.v},
                    {"final_u", r.final_summaries.u}});
  }
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

std::string trajectories_csv(const SimulationOutput& out) {
  if (out.spec.engine.snapshot_every == 0) return {};
  std::string s = "run_index," + trajectory_csv_header(out.spec.dim, out.spec.engine.snapshot_verbose) + "\n";
  for (std::size_t i = 0; i < out.results.size(); ++i)
    for (const auto& row : out.results[i].snapshots) s += std::to_string(i) + "," + row + "\n";
  return s;
}

// ---------------------------------------------------------------- verify

void VerifyRequest::validate() const {
  const auto kind = parse_control_kind(control);
  if (!kind) invalid("unknown control '" + control + "'");
  if (dim < 2) throw Error(ErrorCode::WrongDimension, "dim must be at least 2");
  if (samples < 1000) invalid("samples must be at least 1000");
  if (!(h > 0.0) || !std::isfinite(h)) invalid("h must be positive");
  if (w && !(*w > 0.0 && std::isfinite(*w))) invalid("w must be positive");
  if (!(n_se > 0.0)) invalid("n_se must be positive");
  if (*kind == ControlKind::Mixed) {
    if (!(mu_k > 0.0) || !(mu_h > 0.0)) invalid("mu_k and mu_h must be positive");
    const double wv = w.value_or(100.0);
    if (!(wv * wv > mixed_threshold(dim, mu_k, mu_h)))
      throw Error(ErrorCode::BelowThreshold, "w^2 must exceed the mixed-control threshold");
  }
}

std::string verify_request_to_json(const VerifyRequest& r) {
  Json j = {{"control", r.control}, {"dim", r.dim},   {"samples", r.samples}, {"h", r.h},
            {"seed", r.seed},       {"w", optional_number(r.w)}, {"mu_k", r.mu_k}, {"mu_h", r.mu_h},
            {"n_se", r.n_se}};
  return j.dump(2);
}

VerifyRequest verify_request_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("request is not valid JSON: ") + e.what());
  }
  check_keys(j, {"control", "dim", "samples", "h", "seed", "w", "mu_k", "mu_h", "n_se"}, "request");
  VerifyRequest r;
  read(j, "control", r.control);
  read(j, "dim", r.dim);
  read(j, "samples", r.samples);
  read(j, "h", r.h);
  read(j, "seed", r.seed);
  read_opt(j, "w", r.w);
  read(j, "mu_k", r.mu_k);
  read(j, "mu_h", r.mu_h);
  read(j, "n_se", r.n_se);
  return r;
}

namespace {

Vector random_unit(std::size_t n, Rng& rng) {
  for (;;) {
    Vector v(n);
    for (double& x : v) x = rng.gaussian();
    const double len = norm(v);
    if (len > 1e-3) {
      for (double& x : v) x /= len;
      return v;
    }
  }
}

// Antisymmetric with tr(M^T M) = 1.
AntisymmetricMatrix random_generator(std::size_t n, Rng& rng) {
  for (;;) {
    AntisymmetricMatrix m(n);
    for (double& x : m.upper()) x = rng.gaussian();
    const double len = frobenius_norm(m);
    if (len > 1e-3) return m * (1.0 / len);
  }
}

}  // namespace

VerifyReport run_verification(const VerifyRequest& req) {
  req.validate();
  const ControlKind kind = *parse_control_kind(req.control);
  Rng rng(derive_run_seed(req.seed, 0));

  const std::size_t n = req.dim;
  const double w = req.w.value_or(kind == ControlKind::Mixed ? 100.0 : 10.0);
  const Vector nu = random_unit(n, rng);
  AntisymmetricMatrix z(n);
  if (n == 2)
    z.set(0, 1, 1.0 / std::numbers::sqrt2);
  else
    z = random_generator(n, rng);
  // V = 1, so U = W.
  VerifyReport rep;
  rep.request = req;
  rep.state = CoupledState::from_positions(nu, Vector(n, 0.0), z * w);
  rep.summaries = summarize(rep.state);

  ControlPair ctrl;
  AntisymmetricMatrix gen;
  const double theta = std::numbers::pi * (2.0 * rng.uniform() - 1.0);
  switch (kind) {
    case ControlKind::Reflection: ctrl = reflection_control(nu); break;
    case ControlKind::Synchronous: ctrl = synchronous_control(n); break;
    case ControlKind::Rotation:
      gen = random_generator(n, rng);
      ctrl = rotation_control(theta, gen);
      break;
    case ControlKind::RotatedReflection:
      gen = random_generator(n, rng);
      ctrl = rotated_reflection_control(nu, theta, gen);
      rep.inequality = check_rotated_reflection_bound(*rep.summaries.z_mat, nu, gen);
      break;
    case ControlKind::Mixed: ctrl = mixed_control(rep.summaries, req.mu_k, req.mu_h); break;
  }
  rep.complement_residual = complement_residual(ctrl);

  Rng sample_rng(derive_run_seed(req.seed, 1));
  const EmpiricalRates emp = estimate_rates(ctrl, rep.state, req.h, req.samples, sample_rng);
  rep.general = compare_rates(emp, predict_general(ctrl, rep.summaries), req.n_se);
  if (n == 2) rep.planar = compare_rates(emp, predict_planar(ctrl, rep.summaries), req.n_se);
  rep.znu = check_znu_bound(*rep.summaries.z_mat, nu);

  rep.passed = rep.znu.holds && rep.complement_residual <= 1e-10;
  if (rep.inequality) rep.passed = rep.passed && rep.inequality->holds;
  for (const auto& c : rep.general) rep.passed = rep.passed && c.pass;
  for (const auto& c : rep.planar) rep.passed = rep.passed && c.pass;
  return rep;
}

std::string verify_report_json(const VerifyReport& rep) {
  Json j;
  j["schema"] = kVerifySchema;
  j["version"] = library_version();
  j["request"] = Json::parse(verify_request_to_json(rep.request));
  j["state"] = {{"a", rep.state.a_path()},
                {"b", rep.state.b_path},
                {"area", area_to_json(rep.state.area_diff)},
                {"V", rep.summaries.v},
                {"U", rep.summaries.u},
                {"W", optional_number(rep.summaries.w)}};
  j["complement_residual"] = rep.complement_residual;
  j["general"] = checks_to_json(rep.general);
  if (!rep.planar.empty()) j["planar"] = checks_to_json(rep.planar);
  j["znu_bound"] = {{"value", rep.znu.value}, {"holds", rep.znu.holds}};
  if (rep.inequality) {
    const auto& q = *rep.inequality;
    j["rotated_reflection_bound"] = {{"lhs", q.lhs},
                          {"rhs", q.rhs},
                          {"holds", q.holds},
                          {"candidate_lhs", q.has_candidate ? Json(q.candidate_lhs) : Json(nullptr)},
                          {"candidate_ratio", q.has_candidate ? Json(q.candidate_ratio) : Json(nullptr)}};
  }
  j["passed"] = rep.passed;
  return j.dump(2) + "\n";
}

}  // namespace levycouple
