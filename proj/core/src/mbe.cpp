// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/mbe.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "doppler/bessel.hpp"
#include "doppler/error.hpp"
#include "doppler/rng.hpp"

namespace doppler {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_grid(std::span<const AfEstimate> afs) {
  require(!afs.empty(), "combine: no AF estimates");
  for (const AfEstimate& af : afs) {
    require(af.lags == afs.front().lags, "combine: lag grids differ across antennas");
    require(af.values.size() == af.lags.size(), "combine: values and lags differ in length");
  }
}

std::vector<double> power_of(const cplx* r, int N) {
  std::vector<double> x(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) x[k] = std::norm(r[k]);
  return x;
}

}  // namespace

double ssr(double f_D, const AfEstimate& af, double T_s) {
  require(!af.lags.empty(), "ssr: empty AF estimate");
  const double a = kTwoPi * f_D * T_s;
  double sum = 0.0;
  for (std::size_t i = 0; i < af.lags.size(); ++i) {
    const double j0 = bessel_j0(a * af.lags[i]);
    const double e = af.values[i] - j0 * j0;
    sum += e * e;
  }
  return sum;
}

double ssr_derivative(double f_D, const AfEstimate& af, double T_s) {
  const double a = kTwoPi * T_s;
  double sum = 0.0;
  for (std::size_t i = 0; i < af.lags.size(); ++i) {
    const double u = af.lags[i];
    const double j0 = bessel_j0(a * f_D * u);
    const double j1 = bessel_j1(a * f_D * u);
    sum += 4.0 * a * u * (af.values[i] - j0 * j0) * j0 * j1;
  }
  return sum;
}

double ssr_second_derivative(double f_D, const AfEstimate& af, double T_s) {
  require(f_D > 0.0, "ssr second derivative needs f_D > 0");
  const double a = kTwoPi * T_s;
  double sum = 0.0;
  for (std::size_t i = 0; i < af.lags.size(); ++i) {
    const double u = af.lags[i];
    const double j0 = bessel_j0(a * f_D * u);
    const double j1 = bessel_j1(a * f_D * u);
    const double residual = af.values[i] - j0 * j0;
    sum += 8.0 * a * a * u * u * j0 * j0 * j1 * j1 +
           4.0 * a * u * (a * u * (j0 * j0 - j1 * j1) - j0 * j1 / f_D) * residual;
  }
  return sum;
}

double newton_step(double f_t, const AfEstimate& af, double T_s) {
  if (!(f_t > 0.0)) fail(ErrorCode::StepUndefined, "newton step needs f_t > 0");
  const double d1 = ssr_derivative(f_t, af, T_s);
  const double d2 = ssr_second_derivative(f_t, af, T_s);
  if (!std::isfinite(d2) || d2 == 0.0) fail(ErrorCode::StepUndefined, "second derivative of SSR vanishes");
  return f_t - d1 / d2;
}

EstimateReport fit_af(const AfEstimate& af, double T_s, const SearchSpec& search) {
  require(T_s > 0.0, "fit: T_s must be positive");
  return two_stage_search([&](double f) { return ssr(f, af, T_s); }, search);
}

EstimateReport estimate_miso(std::span<const cplx> samples, const ScenarioConfig& config, const LagGrid& grid,
                             const SearchSpec& search) {
  const AfEstimate af = est_psi_blind(estimate_moments(samples, grid), config.constellation.omega_s);
  EstimateReport report = fit_af(af, config.T_s, search);
  report.method = EstimatorMethod::Miso;
  return report;
}

AfEstimate combine_equal(std::span<const AfEstimate> per_antenna) {
  require_same_grid(per_antenna);
  AfEstimate out;
  out.lags = per_antenna.front().lags;
  out.source = per_antenna.size() == 1 ? per_antenna.front().source : AfSource::Combined;
  out.antenna = per_antenna.size() == 1 ? per_antenna.front().antenna : -1;
  out.values.assign(out.lags.size(), 0.0);
  const double n = static_cast<double>(per_antenna.size());
  for (std::size_t i = 0; i < out.lags.size(); ++i) {
    double sum = 0.0;
    for (const AfEstimate& af : per_antenna) sum += af.values[i];
    out.values[i] = sum / n;
  }
  return out;
}

AfEstimate combine_weighted(std::span<const AfEstimate> per_antenna, const WeightVector& weights) {
  require_same_grid(per_antenna);
  require(weights.lags == per_antenna.front().lags, "combine: weight lags differ from AF lags");
  AfEstimate out;
  out.lags = per_antenna.front().lags;
  out.source = AfSource::Combined;
  out.antenna = -1;
  out.values.assign(out.lags.size(), 0.0);
  for (std::size_t i = 0; i < out.lags.size(); ++i) {
    require(weights.weights[i].size() == per_antenna.size(), "combine: weight count differs from antenna count");
    double sum = 0.0;
    for (std::size_t n = 0; n < per_antenna.size(); ++n) sum += weights.weights[i][n] * per_antenna[n].values[i];
    out.values[i] = sum;
  }
  return out;
}

BootstrapStats bootstrap_stats(const ReceivedBlock& block, const LagGrid& grid, double omega_s, int n_b, Rng& rng) {
  require(n_b >= 2, "bootstrap: n_b must be >= 2");
  require(block.n_r >= 1, "bootstrap: no receive antennas");
  const int N = block.N;
  grid.validate(N);
  const std::vector<int> lags = grid.lags();
  const int n_la = static_cast<int>(lags.size());
  const int n_r = block.n_r;

  std::vector<std::vector<double>> power(static_cast<std::size_t>(n_r));
  for (int n = 0; n < n_r; ++n) power[n] = power_of(block.antenna(n), N);

  BootstrapStats stats;
  stats.lags = lags;
  stats.n_b = n_b;
  stats.replicates.assign(static_cast<std::size_t>(n_la), Eigen::MatrixXd::Zero(n_r, n_b));

  std::vector<double> counts(static_cast<std::size_t>(N));
  std::vector<double> weighted(static_cast<std::size_t>(N));
  const double scale = 2.0 * (omega_s - 1.0);
  for (int t = 0; t < n_b; ++t) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (int k = 0; k < N; ++k) counts[rng.index(static_cast<std::size_t>(N))] += 1.0;
    // prefix[j]: number of draws landing on indices below j
    std::vector<double> prefix(static_cast<std::size_t>(N) + 1, 0.0);
    for (int k = 0; k < N; ++k) prefix[k + 1] = prefix[k] + counts[k];
    for (int n = 0; n < n_r; ++n) {
      const std::vector<double>& x = power[n];
      double s2 = 0.0;
      double s4 = 0.0;
      for (int k = 0; k < N; ++k) {
        weighted[k] = counts[k] * x[k];
        s2 += weighted[k];
        s4 += weighted[k] * x[k];
      }
      const double m2 = s2 / N;
      const double m4 = s4 / N;
      const double denominator = m4 - 2.0 * m2 * m2;
      for (int i = 0; i < n_la; ++i) {
        const int u = lags[i];
        const double* y = weighted.data();
        const double* z = x.data() + u;
        double k_u = 0.0;
        for (int k = 0; k < N - u; ++k) k_u += y[k] * z[k];
        const double retained = prefix[N - u];
        const double kappa = retained > 0.0 ? k_u / retained : 0.0;
        stats.replicates[i](n, t) = scale * (kappa - m2 * m2) / denominator;
      }
    }
  }

  stats.mu.resize(static_cast<std::size_t>(n_la));
  stats.c.resize(static_cast<std::size_t>(n_la));
  for (int i = 0; i < n_la; ++i) {
    const Eigen::MatrixXd& g = stats.replicates[i];
    stats.mu[i] = g.rowwise().mean();
    const Eigen::MatrixXd centered = g.colwise() - stats.mu[i];
    Eigen::MatrixXd c = centered * centered.transpose() / static_cast<double>(n_b - 1);
    stats.c[i] = 0.5 * (c + c.transpose());
  }
  return stats;
}

WeightVector optimal_weights(const BootstrapStats& stats, std::span<const double> psi, bool diagonal_covariance) {
  require(psi.size() == stats.lags.size(), "optimal weights: psi length differs from lag count");
  WeightVector out;
  out.lags = stats.lags;
  out.weights.resize(stats.lags.size());
  for (std::size_t i = 0; i < stats.lags.size(); ++i) {
    const Eigen::Index n_r = stats.mu[i].size();
    const Eigen::VectorXd b = stats.mu[i] - Eigen::VectorXd::Constant(n_r, psi[i]);
    Eigen::MatrixXd m = diagonal_covariance ? Eigen::MatrixXd(stats.c[i].diagonal().asDiagonal()) : stats.c[i];
    m += b * b.transpose();
    m.diagonal().array() += 1e-10 * m.trace() / static_cast<double>(n_r);
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::NumericalFailure, "optimal weights: singular matrix at lag " + std::to_string(stats.lags[i]));
    const Eigen::VectorXd y = llt.solve(Eigen::VectorXd::Ones(n_r));
    const double total = y.sum();
    if (!std::isfinite(total) || total == 0.0)
      fail(ErrorCode::NumericalFailure, "optimal weights: degenerate solution at lag " + std::to_string(stats.lags[i]));
    out.weights[i].resize(static_cast<std::size_t>(n_r));
    for (Eigen::Index n = 0; n < n_r; ++n) out.weights[i][n] = y(n) / total;
  }
  return out;
}

double combiner_mse(const Eigen::VectorXd& w, const Eigen::VectorXd& mu, const Eigen::MatrixXd& c, double psi) {
  const double bias = w.dot(mu) - psi;
  return w.dot(c * w) + bias * bias;
}

EstimateReport estimate_mimo(const ReceivedBlock& block, const ScenarioConfig& config, const LagGrid& grid,
                             const SearchSpec& search, const MimoOptions& options, Rng& rng) {
  require(block.n_r >= 1, "estimate_mimo: no receive antennas");
  std::vector<AfEstimate> per_antenna;
  per_antenna.reserve(static_cast<std::size_t>(block.n_r));
  for (int n = 0; n < block.n_r; ++n) {
    const std::span<const cplx> samples(block.antenna(n), static_cast<std::size_t>(block.N));
    per_antenna.push_back(est_psi_blind(estimate_moments(samples, grid), config.constellation.omega_s, n));
  }
  EstimateReport equal = fit_af(combine_equal(per_antenna), config.T_s, search);
  equal.method = EstimatorMethod::MimoEqual;
  if (options.combining == Combining::Equal) return equal;

  const double f0 = equal.f_hat;
  const BootstrapStats stats = bootstrap_stats(block, grid, config.constellation.omega_s, options.n_b, rng);
  std::vector<double> psi;
  psi.reserve(stats.lags.size());
  for (int u : stats.lags) psi.push_back(theoretical_psi(f0, config.T_s, u));
  const WeightVector weights = optimal_weights(stats, psi, options.diagonal_covariance);

  EstimateReport report = fit_af(combine_weighted(per_antenna, weights), config.T_s, search);
  report.method = EstimatorMethod::MimoOptimal;
  report.diagnostics.provisional_f = f0;
  report.diagnostics.weights = weights.weights;
  report.diagnostics.note = "weights from bootstrap statistics at the equal-weight estimate";
  return report;
}

EstimateReport estimate_semiblind(const ReceivedBlock& block, std::span<const double> noise_vars, double T_s,
                                  const LagGrid& grid, const SearchSpec& search) {
  require(block.n_r >= 1, "estimate_semiblind: no receive antennas");
  require(noise_vars.size() == static_cast<std::size_t>(block.n_r), "estimate_semiblind: one noise variance per antenna");
  std::vector<AfEstimate> per_antenna;
  for (int n = 0; n < block.n_r; ++n) {
    const std::span<const cplx> samples(block.antenna(n), static_cast<std::size_t>(block.N));
    per_antenna.push_back(est_psi_semiblind(estimate_moments(samples, grid), noise_vars[n], n));
  }
  EstimateReport report = fit_af(combine_equal(per_antenna), T_s, search);
  report.method = EstimatorMethod::SemiBlind;
  return report;
}

}  // namespace doppler
