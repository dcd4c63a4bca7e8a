// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "doppler/channel.hpp"
#include "doppler/moments.hpp"
#include "doppler/search.hpp"

namespace doppler {

class Rng;

/// Per-lag combining weights, one entry per receive antenna; each row sums to one.
struct WeightVector {
  std::vector<int> lags;
  std::vector<std::vector<double>> weights;
};

/// Bootstrap mean and covariance of the per-antenna AF estimates.
struct BootstrapStats {
  std::vector<int> lags;
  std::vector<Eigen::VectorXd> mu;         ///< per lag, n_r entries
  std::vector<Eigen::MatrixXd> c;          ///< per lag, n_r x n_r
  std::vector<Eigen::MatrixXd> replicates; ///< per lag, n_r x n_b (the matrix Gamma_u)
  int n_b = 0;
};

enum class Combining { Equal, Optimal };

struct MimoOptions {
  Combining combining = Combining::Equal;
  int n_b = 100;
  bool diagonal_covariance = false;  ///< keep only diag(C_u) inside the weight solve
};

/// Sum of squared residuals between af and J0^2(2 pi f_D T_s u).
double ssr(double f_D, const AfEstimate& af, double T_s);
/// First and second f_D-derivatives of ssr.
double ssr_derivative(double f_D, const AfEstimate& af, double T_s);
double ssr_second_derivative(double f_D, const AfEstimate& af, double T_s);

/// Two-stage least-squares fit of an AF estimate.
EstimateReport fit_af(const AfEstimate& af, double T_s, const SearchSpec& search);

/// Single-antenna blind estimator.
EstimateReport estimate_miso(std::span<const cplx> samples, const ScenarioConfig& config, const LagGrid& grid,
                             const SearchSpec& search);

AfEstimate combine_equal(std::span<const AfEstimate> per_antenna);
AfEstimate combine_weighted(std::span<const AfEstimate> per_antenna, const WeightVector& weights);

/// Resamples the time index with replacement n_b times. Within a resample
/// the same index multiset is used for every antenna; products
/// |r_k|^2 |r_{k+u}|^2 whose partner index k + u falls past N are dropped
/// and the lag-u average runs over the products that remain.
BootstrapStats bootstrap_stats(const ReceivedBlock& block, const LagGrid& grid, double omega_s, int n_b, Rng& rng);

/// y = (C + b b^T + ridge I)^{-1} 1 with b = mu - psi 1, normalized to unit sum.
WeightVector optimal_weights(const BootstrapStats& stats, std::span<const double> psi, bool diagonal_covariance = false);

/// Plug-in MSE  w^T C w + (w^T mu - psi)^2  of one lag's combiner.
double combiner_mse(const Eigen::VectorXd& w, const Eigen::VectorXd& mu, const Eigen::MatrixXd& c, double psi);

/// Multi-antenna blind estimator; rng feeds the bootstrap in optimal mode.
EstimateReport estimate_mimo(const ReceivedBlock& block, const ScenarioConfig& config, const LagGrid& grid,
                             const SearchSpec& search, const MimoOptions& options, Rng& rng);

/// Semi-blind estimator with known per-antenna noise variances, combined with equal weights.
EstimateReport estimate_semiblind(const ReceivedBlock& block, std::span<const double> noise_vars, double T_s,
                                  const LagGrid& grid, const SearchSpec& search);

/// One Newton-Raphson update of the SSR minimization. Not used by the
/// estimators above. Throws step-undefined for f_t <= 0 or a vanishing
/// second derivative.
double newton_step(double f_t, const AfEstimate& af, double T_s);

}  // namespace doppler
