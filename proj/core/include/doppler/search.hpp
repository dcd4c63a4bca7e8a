// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace doppler {

/// Admissible MDS interval and the two grid resolutions.
struct SearchSpec {
  double f_l = 50.0;
  double f_h = 2500.0;
  double delta_rough = 10.0;
  double delta_fine = 0.5;

  void validate() const;
};

enum class EstimatorMethod { Miso, MimoEqual, MimoOptimal, SemiBlind, DaMle, NdaMle };

std::string_view to_string(EstimatorMethod method) noexcept;

struct EstimateDiagnostics {
  int rough_points = 0;
  int fine_points = 0;
  int iterations = 0;       ///< Fisher-scoring iterations summed over starts
  int starts = 0;
  bool converged = true;
  double log_likelihood = 0.0;
  double provisional_f = 0.0;               ///< equal-weight pass feeding the optimal weights
  std::vector<std::vector<double>> weights; ///< per lag, per receive antenna
  std::string note;
};

struct EstimateReport {
  double f_hat = 0.0;
  double rough = 0.0;
  std::vector<std::pair<double, double>> ssr_curve;  ///< (f, objective) for every point evaluated
  EstimatorMethod method = EstimatorMethod::Miso;
  EstimateDiagnostics diagnostics;
};

/// Grid points lo, lo + step, ... <= hi, with hi appended when the step
/// does not land on it.
std::vector<double> grid_points(double lo, double hi, double step);

/// Minimizer of objective over grid_points(lo, hi, step); ties go to the
/// smaller f. Every evaluation is appended to curve when it is non-null.
double grid_search(const std::function<double(double)>& objective, double lo, double hi, double step,
                   std::vector<std::pair<double, double>>* curve = nullptr);

/// Rough search over [f_l, f_h] with delta_rough, then a fine search over
/// [rough - delta_rough, rough + delta_rough] clipped to [f_l, f_h] with
/// delta_fine. Fills f_hat, rough, ssr_curve and point counts.
EstimateReport two_stage_search(const std::function<double(double)>& objective, const SearchSpec& search);

}  // namespace doppler
