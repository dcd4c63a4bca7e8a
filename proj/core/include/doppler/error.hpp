// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace doppler {

enum class ErrorCode {
  InvalidArgument,
  NumericalFailure,
  ConstantModulusUnsupported,
  DegenerateStatistics,
  StepUndefined,
  UnboundedVariance,
  Nonconvergence,
  IntractableEnumeration,
  IndeterminateBound,
  UndefinedNormalization,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the sweep runner in particular) can account for it per trial.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace doppler
