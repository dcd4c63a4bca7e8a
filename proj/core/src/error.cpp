// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/error.hpp"

namespace doppler {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::ConstantModulusUnsupported: return "constant-modulus-unsupported";
    case ErrorCode::DegenerateStatistics: return "degenerate-statistics";
    case ErrorCode::StepUndefined: return "step-undefined";
    case ErrorCode::UnboundedVariance: return "unbounded-variance";
    case ErrorCode::Nonconvergence: return "nonconvergence";
    case ErrorCode::IntractableEnumeration: return "intractable-enumeration";
    case ErrorCode::IndeterminateBound: return "indeterminate-bound";
    case ErrorCode::UndefinedNormalization: return "undefined-normalization";
  }
  return "unknown";
}

}  // namespace doppler
