// SPDX-License-Identifier: Apache-2.0
#include "levycouple/levycouple.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <string>

#include "levycouple/error.hpp"
#include "levycouple/experiment.hpp"

struct lvc_simulation {
  levycouple::ExperimentSpec spec;
  std::optional<levycouple::SimulationOutput> output;
  std::string spec_json;
};

struct lvc_verification {
  levycouple::VerifyRequest request;
  std::optional<levycouple::VerifyReport> report;
  std::string report_json;
};

namespace {

thread_local std::string g_last_error;

lvc_status fail(lvc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

lvc_status status_of(levycouple::ErrorCode code) {
  using levycouple::ErrorCode;
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::WrongDimension:
    case ErrorCode::BelowThreshold:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::NotUnitVector:
    case ErrorCode::NotNormalizedGenerator:
    case ErrorCode::NotNormalized:
    case ErrorCode::NotSymmetric:
      return LVC_INVALID_SPEC;
    case ErrorCode::Io:
      return LVC_IO_ERROR;
    case ErrorCode::NonFinite:
    case ErrorCode::NotPSD:
    case ErrorCode::NonPositiveStep:
    case ErrorCode::DegenerateSummaries:
    case ErrorCode::StepBudgetExhausted:
      return LVC_NUMERIC_ERROR;
  }
  return LVC_INTERNAL_ERROR;
}

// Runs `fn`, translating exceptions into status codes.
template <class Fn>
lvc_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const levycouple::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LVC_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(LVC_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(LVC_INTERNAL_ERROR, "unknown exception");
  }
}

lvc_status write_file(const char* path, const std::string& content) {
  if (!path || !*path) return fail(LVC_INVALID_ARGUMENT, "empty output path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return fail(LVC_IO_ERROR, std::string("cannot open '") + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) return fail(LVC_IO_ERROR, std::string("failed writing '") + path + "'");
  return LVC_OK;
}

lvc_status not_run() { return fail(LVC_INVALID_ARGUMENT, "simulation has not been run"); }

}  // namespace

extern "C" {

const char* lvc_version(void) { return levycouple::library_version(); }

int lvc_seed_split_version(void) { return levycouple::kSeedSplitVersion; }

const char* lvc_status_string(lvc_status status) {
  switch (status) {
    case LVC_OK: return "ok";
    case LVC_INVALID_ARGUMENT: return "invalid argument";
    case LVC_INVALID_SPEC: return "invalid spec";
    case LVC_IO_ERROR: return "i/o error";
    case LVC_VERIFICATION_FAILED: return "verification failed";
    case LVC_NUMERIC_ERROR: return "numeric error";
    case LVC_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* lvc_last_error(void) { return g_last_error.c_str(); }

lvc_status lvc_simulation_create(const char* spec_json, lvc_simulation** out) {
  if (!spec_json || !out) return fail(LVC_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto sim = std::make_unique<lvc_simulation>();
    sim->spec = levycouple::spec_from_json(spec_json);
    sim->spec.validate();
    levycouple::ExperimentSpec resolved = sim->spec;
    const auto cfg = resolved.resolved_engine();
    resolved.epsilon_v = cfg.epsilon_v;
    resolved.epsilon_u = cfg.epsilon_u;
    sim->spec_json = levycouple::spec_to_json(resolved);
    *out = sim.release();
    return LVC_OK;
  });
}

void lvc_simulation_destroy(lvc_simulation* sim) { delete sim; }

lvc_status lvc_simulation_run(lvc_simulation* sim, unsigned threads) {
  if (!sim) return fail(LVC_INVALID_ARGUMENT, "null handle");
  if (threads == 0) return fail(LVC_INVALID_ARGUMENT, "threads must be at least 1");
  return guarded([&] {
    levycouple::ExperimentSpec spec = sim->spec;
    spec.threads = threads;
    sim->output = levycouple::simulate(spec);
    return LVC_OK;
  });
}

lvc_status lvc_simulation_run_count(const lvc_simulation* sim, size_t* out) {
  if (!sim || !out) return fail(LVC_INVALID_ARGUMENT, "null argument");
  if (!sim->output) return not_run();
  *out = sim->output->results.size();
  return LVC_OK;
}

lvc_status lvc_simulation_get_run(const lvc_simulation* sim, size_t index, lvc_run_result* out) {
  if (!sim || !out) return fail(LVC_INVALID_ARGUMENT, "null argument");
  if (!sim->output) return not_run();
  if (index >= sim->output->results.size()) return fail(LVC_INVALID_ARGUMENT, "run index out of range");
  const auto& r = sim->output->results[index];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out->coupled = r.coupled ? 1 : 0;
  out->t_coupling = r.t_coupling.value_or(nan);
  out->tau_coupling = r.tau_coupling.value_or(nan);
  out->steps = r.steps;
  out->final_v = r.final_summaries.v;
  out->final_u = r.final_summaries.u;
  return LVC_OK;
}

lvc_status lvc_simulation_coupling_fraction(const lvc_simulation* sim, double* out) {
  if (!sim || !out) return fail(LVC_INVALID_ARGUMENT, "null argument");
  if (!sim->output) return not_run();
  *out = levycouple::summarize_results(sim->output->results).coupling_fraction;
  return LVC_OK;
}

lvc_status lvc_simulation_write_csv(const lvc_simulation* sim, const char* path) {
  if (!sim) return fail(LVC_INVALID_ARGUMENT, "null handle");
  if (!sim->output) return not_run();
  return guarded([&] { return write_file(path, levycouple::results_csv(sim->output->results)); });
}

lvc_status lvc_simulation_write_sidecar(const lvc_simulation* sim, const char* path) {
  if (!sim) return fail(LVC_INVALID_ARGUMENT, "null handle");
  if (!sim->output) return not_run();
  return guarded([&] { return write_file(path, levycouple::summary_json(*sim->output)); });
}

lvc_status lvc_simulation_write_json(const lvc_simulation* sim, const char* path) {
  if (!sim) return fail(LVC_INVALID_ARGUMENT, "null handle");
  if (!sim->output) return not_run();
  return guarded([&] { return write_file(path, levycouple::results_json(*sim->output)); });
}

lvc_status lvc_simulation_write_trajectories(const lvc_simulation* sim, const char* path) {
  if (!sim) return fail(LVC_INVALID_ARGUMENT, "null handle");
  if (!sim->output) return not_run();
  if (sim->spec.engine.snapshot_every == 0) return fail(LVC_INVALID_ARGUMENT, "snapshots are disabled in the spec");
  return guarded([&] { return write_file(path, levycouple::trajectories_csv(*sim->output)); });
}

lvc_status lvc_simulation_spec_json(const lvc_simulation* sim, const char** out) {
  if (!sim || !out) return fail(LVC_INVALID_ARGUMENT, "null argument");
  *out = sim->spec_json.c_str();
  return LVC_OK;
}

lvc_status lvc_verification_create(const char* request_json, lvc_verification** out) {
  if (!request_json || !out) return fail(LVC_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto ver = std::make_unique<lvc_verification>();
    ver->request = levycouple::verify_request_from_json(request_json);
    ver->request.validate();
    *out = ver.release();
    return LVC_OK;
  });
}

void lvc_verification_destroy(lvc_verification* ver) { delete ver; }

lvc_status lvc_verification_run(lvc_verification* ver, int* passed) {
  if (!ver || !passed) return fail(LVC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ver->report = levycouple::run_verification(ver->request);
    ver->report_json = levycouple::verify_report_json(*ver->report);
    *passed = ver->report->passed ? 1 : 0;
    return LVC_OK;
  });
}

lvc_status lvc_verification_report_json(const lvc_verification* ver, const char** out) {
  if (!ver || !out) return fail(LVC_INVALID_ARGUMENT, "null argument");
  if (!ver->report) return fail(LVC_INVALID_ARGUMENT, "verification has not been run");
  *out = ver->report_json.c_str();
  return LVC_OK;
}

lvc_status lvc_verification_write_report(const lvc_verification* ver, const char* path) {
  if (!ver) return fail(LVC_INVALID_ARGUMENT, "null handle");
  if (!ver->report) return fail(LVC_INVALID_ARGUMENT, "verification has not been run");
  return guarded([&] { return write_file(path, ver->report_json); });
}

}  // extern "C"
