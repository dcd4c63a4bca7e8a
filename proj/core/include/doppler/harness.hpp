// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "doppler/channel.hpp"
#include "doppler/mbe.hpp"
#include "doppler/moments.hpp"
#include "doppler/search.hpp"

namespace doppler {

inline constexpr double kSpeedOfLight = 299792458.0;

/// sigma_w^2 = 10^(-gamma/10) / n_r
double snr_to_noise_var(double gamma_db, int n_r);

/// f_c v / c
double doppler_from_velocity(double v, double f_c);

/// Scenario description from which a ScenarioConfig is derived. Empty
/// vectors are filled from the defaults: symbol powers 1/(n_t n_r), noise
/// variances from snr_db, an exponential delay profile with l_rms (0 means
/// L/4) on every link.
struct ScenarioSpec {
  int n_t = 2;
  int n_r = 2;
  int L = 5;
  double f_D = 100.0;
  double T_s = 1e-5;
  int N = 10000;
  std::string constellation = "64QAM";
  double snr_db = 10.0;
  double l_rms = 0.0;
  std::vector<double> symbol_powers;
  std::vector<double> noise_vars;
  std::vector<double> delay_profile;
  std::uint64_t seed = 1;
};

ScenarioConfig make_scenario(const ScenarioSpec& spec);

struct TrialResult {
  double axis_value = 0.0;
  std::string estimator;
  int trial = 0;
  double f_true = 0.0;
  double f_hat = 0.0;
  double wall_time = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok" || status == "nonconvergence"; }
};

/// sqrt(mean((f_hat T_s - f T_s)^2)) / (f T_s) over the successful trials.
///
/// Throws undefined-normalization when f_true is zero and invalid-argument
/// when the trials disagree on f_true or none succeeded.
double nrmse(std::span<const TrialResult> results, double T_s);

struct SummaryRow {
  double axis_value = 0.0;
  std::string estimator;
  int trials = 0;
  int failures = 0;
  double nrmse = 0.0;                ///< implied by the bound for crlb rows
  std::optional<double> mean_ratio;  ///< E{f_hat / f}; absent for bound rows
  std::optional<double> crlb;
  double crlb_stderr = 0.0;
};

enum class SweepAxis { DopplerRate, SnrDb, NTx, NRx, N, UMin };

std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_axis(std::string_view name);

/// Estimator tags accepted in SweepSpec::estimators.
std::span<const std::string_view> estimator_tags() noexcept;

struct SweepSpec {
  SweepAxis axis = SweepAxis::DopplerRate;
  std::vector<double> values;
  int trials = 100;
  ScenarioSpec base;
  std::vector<std::string> estimators{"mbe_equal"};
  std::uint64_t master_seed = 1;

  /// Lag grid; a zero u_max selects the standard grid for each point's (L, N).
  LagGrid grid{0, 0, 10};
  SearchSpec search;
  int n_b = 100;
  bool diagonal_covariance = false;
  int n_starts = 8;
  int n_mc = 500;
  double h_rel = 1e-3;

  void validate() const;
};

struct SweepResult {
  std::vector<TrialResult> trials;  ///< ordered by (axis index, estimator, trial)
  std::vector<SummaryRow> summary;  ///< ordered by (axis index, estimator)
};

/// Scenario for one sweep point: base with the axis parameter replaced.
ScenarioSpec sweep_point(const SweepSpec& spec, std::size_t axis_index);
/// Lag grid for a scenario, ignoring the sweep axis.
LagGrid sweep_grid(const SweepSpec& spec, const ScenarioSpec& point);
/// Lag grid used at one sweep point, including a u_min axis value.
LagGrid sweep_grid(const SweepSpec& spec, std::size_t axis_index);

/// Trial seeds are derive_seed(master_seed, {axis index, trial index}); all
/// estimators of a trial see the same received block. Results do not
/// depend on the thread count.
SweepResult run_sweep(const SweepSpec& spec, int threads = 1);

}  // namespace doppler
