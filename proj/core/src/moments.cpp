// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/moments.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "doppler/bessel.hpp"
#include "doppler/error.hpp"

namespace doppler {

std::vector<int> LagGrid::lags() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n_la()));
  for (int u = u_min; u <= u_max; u += u_s) out.push_back(u);
  return out;
}

void LagGrid::validate(int N) const {
  require(u_s >= 1, "lag grid: u_s must be >= 1");
  require(u_min >= 1, "lag grid: u_min must be >= 1");
  require(u_min <= u_max, "lag grid: u_min must not exceed u_max");
  require(u_max <= N - 1, "lag grid: u_max (" + std::to_string(u_max) + ") must be <= N - 1 (" +
                              std::to_string(N - 1) + ")");
}

LagGrid LagGrid::standard(int L, int N) { return LagGrid{L, N / 10, 10}; }

double est_mu2(std::span<const cplx> samples) {
  require(!samples.empty(), "est_mu2: empty input");
  double sum = 0.0;
  for (const cplx& r : samples) sum += std::norm(r);
  return sum / static_cast<double>(samples.size());
}

double est_mu4(std::span<const cplx> samples) {
  require(!samples.empty(), "est_mu4: empty input");
  double sum = 0.0;
  for (const cplx& r : samples) {
    const double p = std::norm(r);
    sum += p * p;
  }
  return sum / static_cast<double>(samples.size());
}

namespace {

double kappa_from_power(const std::vector<double>& power, int u) {
  const std::size_t count = power.size() - static_cast<std::size_t>(u);
  const double* a = power.data();
  const double* b = power.data() + u;
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) sum += a[k] * b[k];
  return sum / static_cast<double>(count);
}

std::vector<double> instantaneous_power(std::span<const cplx> samples) {
  std::vector<double> power(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) power[k] = std::norm(samples[k]);
  return power;
}

}  // namespace

double est_kappa(std::span<const cplx> samples, int u) {
  const int N = static_cast<int>(samples.size());
  require(u >= 1 && u <= N - 1, "est_kappa: lag " + std::to_string(u) + " outside [1, N-1]");
  return kappa_from_power(instantaneous_power(samples), u);
}

MomentSet estimate_moments(std::span<const cplx> samples, const LagGrid& grid) {
  const int N = static_cast<int>(samples.size());
  require(N >= 2, "estimate_moments: need at least two samples");
  grid.validate(N);
  const std::vector<double> power = instantaneous_power(samples);
  MomentSet moments;
  moments.n_samples = N;
  double s2 = 0.0;
  double s4 = 0.0;
  for (double p : power) {
    s2 += p;
    s4 += p * p;
  }
  moments.mu2 = s2 / N;
  moments.mu4 = s4 / N;
  moments.lags = grid.lags();
  moments.kappa.reserve(moments.lags.size());
  for (int u : moments.lags) moments.kappa.push_back(kappa_from_power(power, u));
  return moments;
}

AfEstimate est_psi_blind(const MomentSet& moments, double omega_s, int antenna) {
  if (omega_s <= 1.0 + 1e-9)
    fail(ErrorCode::ConstantModulusUnsupported,
         "blind estimate needs omega_s > 1 (got " + std::to_string(omega_s) + ")");
  const double mu2sq = moments.mu2 * moments.mu2;
  const double denominator = moments.mu4 - 2.0 * mu2sq;
  if (!(std::fabs(denominator) >= 1e-12 * mu2sq) || mu2sq == 0.0)
    fail(ErrorCode::DegenerateStatistics, "mu4 - 2 mu2^2 is numerically zero");
  const double scale = 2.0 * (omega_s - 1.0) / denominator;
  AfEstimate af;
  af.source = AfSource::Blind;
  af.antenna = antenna;
  af.lags = moments.lags;
  af.values.reserve(moments.kappa.size());
  for (double kappa : moments.kappa) af.values.push_back(scale * (kappa - mu2sq));
  return af;
}

AfEstimate est_psi_semiblind(const MomentSet& moments, double noise_var, int antenna) {
  const double mu2sq = moments.mu2 * moments.mu2;
  const double signal = moments.mu2 - noise_var;
  if (!(signal > 0.0) || signal * signal < 1e-12 * mu2sq)
    fail(ErrorCode::DegenerateStatistics, "mu2 does not exceed the noise variance");
  AfEstimate af;
  af.source = AfSource::SemiBlind;
  af.antenna = antenna;
  af.lags = moments.lags;
  af.values.reserve(moments.kappa.size());
  const double scale = 1.0 / (signal * signal);
  for (double kappa : moments.kappa) af.values.push_back(scale * (kappa - mu2sq));
  return af;
}

double theoretical_psi(double f_D, double T_s, double u) {
  const double j0 = bessel_j0(2.0 * std::numbers::pi * f_D * T_s * u);
  return j0 * j0;
}

}  // namespace doppler
