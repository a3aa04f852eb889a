// SPDX-License-Identifier: Apache-2.0
#include "levycouple/error.hpp"

namespace levycouple {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFinite: return "non-finite value";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::LengthMismatch: return "length mismatch";
    case ErrorCode::NotSymmetric: return "matrix not symmetric";
    case ErrorCode::NotPSD: return "matrix not positive semidefinite";
    case ErrorCode::NonPositiveStep: return "non-positive step";
    case ErrorCode::NotUnitVector: return "not a unit vector";
    case ErrorCode::NotNormalizedGenerator: return "generator not normalized";
    case ErrorCode::NotNormalized: return "not normalized";
    case ErrorCode::BelowThreshold: return "below threshold";
    case ErrorCode::DegenerateSummaries: return "degenerate summaries";
    case ErrorCode::WrongDimension: return "wrong dimension";
    case ErrorCode::StepBudgetExhausted: return "step budget exhausted";
    case ErrorCode::ConfigInvalid: return "invalid configuration";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace levycouple
