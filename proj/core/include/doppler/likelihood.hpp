// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "doppler/channel.hpp"
#include "doppler/constellation.hpp"
#include "doppler/search.hpp"

namespace doppler {

class Rng;

/// Real stacking of the received samples: for every antenna the N real
/// parts followed by the N imaginary parts, antennas concatenated.
struct StackedObservation {
  int n_r = 0;
  int N = 0;
  Eigen::VectorXd r;

  static StackedObservation from(const ReceivedBlock& block);
  Eigen::VectorBlock<const Eigen::VectorXd> antenna(int n) const { return r.segment(2 * N * n, 2 * N); }
};

/// Parameter vector theta: noise variances, tap variances and f_D, plus the
/// symbol powers used by the mixture density. Layout of delay_profile
/// follows ScenarioConfig.
struct ModelParams {
  int n_t = 1;
  int n_r = 1;
  int L = 1;
  double T_s = 1e-5;
  double f_D = 0.0;
  std::vector<double> noise_vars;
  std::vector<double> delay_profile;
  std::vector<double> symbol_powers;

  static ModelParams from(const ScenarioConfig& config);
  double tap_variance(int m, int n, int l) const { return delay_profile[(static_cast<std::size_t>(m) * n_r + n) * L + l]; }
  void validate() const;
};

/// Per-antenna 2N x 2N blocks of the block-diagonal covariance and their
/// f_D-derivatives. The zero off-diagonal antenna blocks are never stored.
struct CovarianceModel {
  int N = 0;
  double f_D = 0.0;
  std::vector<Eigen::MatrixXd> sigma;
  std::vector<Eigen::MatrixXd> dsigma;  ///< empty when not requested
};

enum class BoundMode { Da, Nda };

struct BoundReport {
  double f_D = 0.0;
  double fisher_info = 0.0;
  std::optional<double> crlb;  ///< absent when the information estimate is not positive
  BoundMode mode = BoundMode::Da;
  int mc_samples = 0;
  double mc_stderr = 0.0;
};

/// Covariance of the received vector given known symbols. The pilots carry
/// their transmit power (as produced by generate_symbols).
CovarianceModel build_cov_da(const SymbolBlock& pilots, const ModelParams& params, int N, bool with_derivative = true);

double log_pdf_gaussian(const StackedObservation& obs, const CovarianceModel& cov);
double fisher_info_da(const CovarianceModel& cov);
/// 1 / I(f_D); throws unbounded-variance when I(f_D) is zero.
double crlb_da(const CovarianceModel& cov);
double score_da(const StackedObservation& obs, const CovarianceModel& cov);

struct LikelihoodTerms {
  double log_likelihood = 0.0;
  double score = 0.0;
  double fisher_info = 0.0;
};

/// Log-density, score and Fisher information from one factorization per antenna.
LikelihoodTerms evaluate_da(const StackedObservation& obs, const CovarianceModel& cov);

/// Fisher scoring from n_starts initial values. The first start is the centre
/// of [f_l, f_h]; further starts are spread evenly over the interval,
/// endpoints included, so a larger n_starts always contains a smaller one.
EstimateReport mle_da(const StackedObservation& obs, const SymbolBlock& pilots, const ModelParams& params,
                      const SearchSpec& search, int n_starts);

/// Two-stage grid maximization of the DA log-likelihood.
EstimateReport mle_da_grid(const StackedObservation& obs, const SymbolBlock& pilots, const ModelParams& params,
                           const SearchSpec& search);

inline constexpr double kEnumerationCap = 1048576.0;  // 2^20

/// Uniform mixture over every constellation vector of length (N + L - 1) n_t.
///
/// Each mixture term is factorized once per f_D and reused for every
/// observation handed to loglik().
class NdaMixture {
 public:
  /// Throws intractable-enumeration when |M|^{(N+L-1) n_t} exceeds the cap.
  NdaMixture(const ConstellationSpec& constellation, const ModelParams& params, int N);

  std::size_t terms() const noexcept { return terms_; }
  int N() const noexcept { return N_; }

  /// log p(r; f_D) for every observation.
  std::vector<double> loglik(std::span<const StackedObservation> obs, double f_D) const;

 private:
  SymbolBlock term_symbols(std::size_t index) const;

  ConstellationSpec constellation_;
  ModelParams params_;
  int N_;
  std::size_t terms_;
};

double nda_loglik(const StackedObservation& obs, const ConstellationSpec& constellation, const ModelParams& params,
                  double f_D);

/// Two-stage grid maximization of the mixture log-likelihood.
EstimateReport mle_nda(const StackedObservation& obs, const ConstellationSpec& constellation, const ModelParams& params,
                       const SearchSpec& search);

/// mle_nda for many observations of one scenario; each grid point is
/// factorized once for the whole batch. Results match mle_nda exactly.
std::vector<EstimateReport> mle_nda_batch(std::span<const StackedObservation> obs, const ConstellationSpec& constellation,
                                          const ModelParams& params, const SearchSpec& search);

/// Monte Carlo Fisher information of the mixture density: minus the mean
/// central second difference (step h_rel * f_D) of the log-likelihood over
/// n_mc observations simulated from scenario. crlb is left empty when the
/// estimate is not positive.
BoundReport crlb_nda_mc(const ScenarioConfig& scenario, int n_mc, Rng& rng, double h_rel = 1e-3);

/// DA bound for one scenario with pilots drawn from rng.
BoundReport crlb_da_scenario(const ScenarioConfig& scenario, Rng& rng);

}  // namespace doppler
