// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/bessel.hpp"

#include <cmath>
#include <numbers>

namespace doppler {
namespace {

constexpr double kSeriesLimit = 16.0;

// Ascending series; long double absorbs the cancellation between terms,
// whose magnitude peaks near 1e5 at the switch-over point.
double series(int order, double x) noexcept {
  const long double q = -0.25L * static_cast<long double>(x) * x;
  long double term = order == 0 ? 1.0L : 0.5L * x;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + order));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && std::fabs(term) < 1e-24L) break;
  }
  return static_cast<double>(sum);
}

// Hankel expansion for x >= kSeriesLimit. The terms a_k(nu)/x^k first
// shrink and then grow; summation stops at the smallest one.
void hankel(int order, double x, double& p, double& q) noexcept {
  const double mu = 4.0 * order * order;
  p = 1.0;
  q = 0.0;
  double term = 1.0;
  double previous = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double magnitude = std::fabs(term);
    if (magnitude > previous) break;
    previous = magnitude;
    // a_k enters P with sign (-1)^(k/2) for even k and Q with (-1)^((k-1)/2) for odd k.
    const int r = k % 4;
    if (r == 0) p += term;
    else if (r == 1) q += term;
    else if (r == 2) p -= term;
    else q -= term;
    if (magnitude < 1e-18) break;
  }
}

}  // namespace

double bessel_j0(double x) noexcept {
  const double ax = std::fabs(x);
  if (ax < kSeriesLimit) return series(0, ax);
  double p = 0.0;
  double q = 0.0;
  hankel(0, ax, p, q);
  const double c = std::cos(ax);
  const double s = std::sin(ax);
  // chi = x - pi/4
  const double cos_chi = (c + s) * std::numbers::sqrt2 * 0.5;
  const double sin_chi = (s - c) * std::numbers::sqrt2 * 0.5;
  return std::sqrt(2.0 / (std::numbers::pi * ax)) * (p * cos_chi - q * sin_chi);
}

double bessel_j1(double x) noexcept {
  const double ax = std::fabs(x);
  double value = 0.0;
  if (ax < kSeriesLimit) {
    value = series(1, ax);
  } else {
    double p = 0.0;
    double q = 0.0;
    hankel(1, ax, p, q);
    const double c = std::cos(ax);
    const double s = std::sin(ax);
    // chi = x - 3pi/4
    const double cos_chi = (s - c) * std::numbers::sqrt2 * 0.5;
    const double sin_chi = -(s + c) * std::numbers::sqrt2 * 0.5;
    value = std::sqrt(2.0 / (std::numbers::pi * ax)) * (p * cos_chi - q * sin_chi);
  }
  return x < 0.0 ? -value : value;
}

}  // namespace doppler
