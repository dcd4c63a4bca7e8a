// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "doppler/constellation.hpp"

namespace doppler {

using cplx = std::complex<double>;

class Rng;

/// Full parameterization of one MIMO frequency-selective Rayleigh scenario.
///
/// delay_profile is indexed [(m * n_r + n) * L + l] and holds the variance
/// of tap l on the link from transmit antenna m to receive antenna n.
struct ScenarioConfig {
  int n_t = 2;
  int n_r = 2;
  int L = 5;
  double f_D = 100.0;
  double T_s = 1e-5;
  int N = 10000;
  ConstellationSpec constellation;
  std::vector<double> symbol_powers;
  std::vector<double> noise_vars;
  std::vector<double> delay_profile;
  std::uint64_t seed = 1;

  double tap_variance(int m, int n, int l) const { return delay_profile[(static_cast<std::size_t>(m) * n_r + n) * L + l]; }
  double doppler_rate() const noexcept { return f_D * T_s; }

  /// Throws invalid-argument when an invariant is violated.
  void validate() const;
};

/// Length-L exponential power delay profile exp(-l_rms * l / L), l = 1..L,
/// normalized to unit sum.
std::vector<double> exponential_delay_profile(int L, double l_rms);

/// Channel gains h_{k,l}^{(mn)}, stored [((m * n_r + n) * L + l) * N + k].
struct FadingRealization {
  int n_t = 0;
  int n_r = 0;
  int L = 0;
  int N = 0;
  std::vector<cplx> taps;

  cplx& at(int m, int n, int l, int k) { return taps[index(m, n, l) + static_cast<std::size_t>(k)]; }
  const cplx& at(int m, int n, int l, int k) const { return taps[index(m, n, l) + static_cast<std::size_t>(k)]; }
  const cplx* sequence(int m, int n, int l) const { return taps.data() + index(m, n, l); }

 private:
  std::size_t index(int m, int n, int l) const {
    return ((static_cast<std::size_t>(m) * n_r + n) * L + l) * static_cast<std::size_t>(N);
  }
};

/// Transmitted symbols for time indices 1-L .. N-1.
///
/// Element (m, j) holds s^{(m)}_{j+1-L}; the term s_{k-l} of the received
/// signal (k = 1..N, l = 1..L) lives at j = k - l + L - 1.
struct SymbolBlock {
  int n_t = 0;
  int L = 0;
  int N = 0;
  std::vector<cplx> symbols;

  int span() const noexcept { return N + L - 1; }
  cplx& at(int m, int j) { return symbols[static_cast<std::size_t>(m) * span() + j]; }
  const cplx& at(int m, int j) const { return symbols[static_cast<std::size_t>(m) * span() + j]; }
  /// s^{(m)}_{k-l} with 1-based k and l.
  const cplx& lagged(int m, int k, int l) const { return at(m, k - l + L - 1); }
};

/// Received baseband samples r_k^{(n)}, one row per receive antenna.
struct ReceivedBlock {
  int n_r = 0;
  int N = 0;
  std::vector<cplx> samples;

  cplx* antenna(int n) { return samples.data() + static_cast<std::size_t>(n) * N; }
  const cplx* antenna(int n) const { return samples.data() + static_cast<std::size_t>(n) * N; }
  std::vector<cplx> antenna_copy(int n) const { return {antenna(n), antenna(n) + N}; }
};

/// sigma_h2 * J0(2 pi f_D T_s |i - j|) as an N x N matrix.
Eigen::MatrixXd build_tap_covariance(double f_D, double T_s, int N, double sigma_h2);

enum class FadingMethod {
  Automatic,          ///< Cholesky up to kCholeskyMaxN, circulant embedding above.
  Cholesky,           ///< Exact Toeplitz factorization with jitter retry.
  CirculantEmbedding, ///< FFT-based, tapered extension, negative eigenvalues clipped.
};

inline constexpr int kCholeskyMaxN = 2048;

/// Lower Cholesky factor of the unit-variance J0 Toeplitz covariance, with
/// 1e-10 and then 1e-8 diagonal jitter on failure.
Eigen::MatrixXd jakes_cholesky_factor(double doppler_rate, int N);

/// Draws every (m, n, l) sequence from its own child stream of rng:
/// split({1, m, n, l}).
FadingRealization generate_fading(const ScenarioConfig& config, const Rng& rng,
                                  FadingMethod method = FadingMethod::Automatic);

/// Symbols of antenna m come from split({2, m}), scaled by sqrt(sigma_s_m^2).
SymbolBlock generate_symbols(const ScenarioConfig& config, const Rng& rng);

/// r_k = sum_m sum_l h_{k,l} s_{k-l} + w_k; noise of antenna n from split({3, n}).
ReceivedBlock generate_received(const ScenarioConfig& config, const FadingRealization& fading,
                                const SymbolBlock& symbols, const Rng& rng);

/// Fading, symbols and received signal of one trial, all derived from rng.
struct Simulation {
  FadingRealization fading;
  SymbolBlock symbols;
  ReceivedBlock received;
};
Simulation simulate(const ScenarioConfig& config, const Rng& rng, FadingMethod method = FadingMethod::Automatic);

/// r_k <- r_k exp(j omega k), k = 1..N.
ReceivedBlock apply_cfo(const ReceivedBlock& block, double omega);

}  // namespace doppler
