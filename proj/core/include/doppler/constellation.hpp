// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace doppler {

class Rng;

/// Unit-power symbol alphabet.
///
/// `points` is empty for the continuous GAUSS source (circular complex
/// normal, omega_s = 2); every finite set is normalized so that the mean of
/// |c_i|^2 is one, and omega_s is the mean of |c_i|^4.
struct ConstellationSpec {
  std::string name;
  std::vector<std::complex<double>> points;
  double omega_s = 1.0;

  bool is_continuous() const noexcept { return points.empty(); }
  std::size_t size() const noexcept { return points.size(); }

  /// One unit-power draw.
  std::complex<double> draw(Rng& rng) const;
};

/// Builds a named alphabet: BPSK, QPSK, 8PSK, 16QAM, 64QAM, GAUSS, or UNIT
/// (the single point 1, used to reduce mixture likelihoods to the DA case).
ConstellationSpec make_constellation(std::string_view name);

/// Normalizes an arbitrary finite alphabet to unit power and fills omega_s.
ConstellationSpec make_constellation(std::string name, std::vector<std::complex<double>> points);

}  // namespace doppler
