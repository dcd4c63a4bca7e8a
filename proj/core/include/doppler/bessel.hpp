// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace doppler {

/// Bessel functions of the first kind, orders 0 and 1.
///
/// Power series (evaluated in extended precision) below |x| = 16, Hankel
/// asymptotic expansion above. Absolute error is below 1e-13 for
/// |x| <= 1e4, which the J0-based correlation model needs for lags up
/// to N/10 at Doppler rates of a few percent.
double bessel_j0(double x) noexcept;
double bessel_j1(double x) noexcept;

}  // namespace doppler
