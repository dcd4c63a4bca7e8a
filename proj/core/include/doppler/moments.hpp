// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace doppler {

using cplx = std::complex<double>;

/// Uniformly downsampled delay lags u_min, u_min + u_s, ..., <= u_max.
struct LagGrid {
  int u_min = 1;
  int u_max = 1;
  int u_s = 1;

  int n_la() const noexcept { return (u_max - u_min) / u_s + 1; }
  std::vector<int> lags() const;

  /// Throws invalid-argument unless 1 <= u_min <= u_max <= N - 1 and u_s >= 1.
  void validate(int N) const;

  /// U_min = L, U_max = floor(N / 10), u_s = 10.
  static LagGrid standard(int L, int N);
};

/// Sample statistics of one antenna's received sequence.
struct MomentSet {
  double mu2 = 0.0;
  double mu4 = 0.0;
  std::vector<int> lags;
  std::vector<double> kappa;  ///< aligned with lags
  int n_samples = 0;
};

enum class AfSource { Blind, SemiBlind, Combined, Synthetic };

/// Estimated normalized squared autocorrelation over a lag grid.
struct AfEstimate {
  std::vector<int> lags;
  std::vector<double> values;
  AfSource source = AfSource::Blind;
  int antenna = 0;

  std::size_t size() const noexcept { return lags.size(); }
};

/// (1/N) sum |r_k|^2
double est_mu2(std::span<const cplx> samples);
/// (1/N) sum |r_k|^4
double est_mu4(std::span<const cplx> samples);
/// (1/(N-u)) sum_{k=1}^{N-u} |r_k|^2 |r_{k+u}|^2, 1 <= u <= N-1.
double est_kappa(std::span<const cplx> samples, int u);

MomentSet estimate_moments(std::span<const cplx> samples, const LagGrid& grid);

/// Blind form 2(omega_s - 1)(kappa - mu2^2)/(mu4 - 2 mu2^2).
///
/// Throws constant-modulus-unsupported when omega_s <= 1 + 1e-9 and
/// degenerate-statistics when |mu4 - 2 mu2^2| < 1e-12 mu2^2.
AfEstimate est_psi_blind(const MomentSet& moments, double omega_s, int antenna = 0);

/// Noise-aided form (kappa - mu2^2)/(mu2 - sigma_w^2)^2. Valid as a model
/// only for one transmit antenna and a flat channel; no restriction is
/// enforced. Throws degenerate-statistics when mu2 <= sigma_w^2 + eps.
AfEstimate est_psi_semiblind(const MomentSet& moments, double noise_var, int antenna = 0);

/// J0^2(2 pi f_D T_s u)
double theoretical_psi(double f_D, double T_s, double u);

}  // namespace doppler
