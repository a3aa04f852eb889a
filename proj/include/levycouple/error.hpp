// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace levycouple {

enum class ErrorCode {
  NonFinite,
  DimensionMismatch,
  LengthMismatch,
  NotSymmetric,
  NotPSD,
  NonPositiveStep,
  NotUnitVector,
  NotNormalizedGenerator,
  NotNormalized,
  BelowThreshold,
  DegenerateSummaries,
  WrongDimension,
  StepBudgetExhausted,
  ConfigInvalid,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can map it onto a status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace levycouple
