// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/search.hpp"

#include <algorithm>
#include <cmath>

#include "doppler/error.hpp"

namespace doppler {

void SearchSpec::validate() const {
  require(f_l > 0.0 && f_l < f_h, "search: need 0 < f_l < f_h");
  require(delta_fine > 0.0 && delta_fine <= delta_rough, "search: need 0 < delta_fine <= delta_rough");
}

std::string_view to_string(EstimatorMethod method) noexcept {
  switch (method) {
    case EstimatorMethod::Miso: return "miso";
    case EstimatorMethod::MimoEqual: return "mimo_equal";
    case EstimatorMethod::MimoOptimal: return "mimo_optimal";
    case EstimatorMethod::SemiBlind: return "semi_blind";
    case EstimatorMethod::DaMle: return "mle_da";
    case EstimatorMethod::NdaMle: return "mle_nda";
  }
  return "unknown";
}

std::vector<double> grid_points(double lo, double hi, double step) {
  require(lo <= hi, "grid: lo must not exceed hi");
  require(step > 0.0 && std::isfinite(step), "grid: step must be positive");
  std::vector<double> points;
  const double slack = 1e-9 * step;
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  points.reserve(static_cast<std::size_t>(count) + 2);
  for (long long i = 0; i <= count; ++i) {
    const double f = lo + static_cast<double>(i) * step;
    if (f > hi + slack) break;
    points.push_back(std::min(f, hi));
  }
  if (points.empty() || points.back() < hi - slack) points.push_back(hi);
  return points;
}

double grid_search(const std::function<double(double)>& objective, double lo, double hi, double step,
                   std::vector<std::pair<double, double>>* curve) {
  double best_f = lo;
  double best_value = 0.0;
  bool first = true;
  for (double f : grid_points(lo, hi, step)) {
    const double value = objective(f);
    if (curve) curve->emplace_back(f, value);
    if (first || value < best_value) {
      best_f = f;
      best_value = value;
      first = false;
    }
  }
  return best_f;
}

EstimateReport two_stage_search(const std::function<double(double)>& objective, const SearchSpec& search) {
  search.validate();
  EstimateReport report;
  report.rough = grid_search(objective, search.f_l, search.f_h, search.delta_rough, &report.ssr_curve);
  report.diagnostics.rough_points = static_cast<int>(report.ssr_curve.size());
  const double lo = std::max(search.f_l, report.rough - search.delta_rough);
  const double hi = std::min(search.f_h, report.rough + search.delta_rough);
  report.f_hat = grid_search(objective, lo, hi, search.delta_fine, &report.ssr_curve);
  report.diagnostics.fine_points = static_cast<int>(report.ssr_curve.size()) - report.diagnostics.rough_points;
  return report;
}

}  // namespace doppler
