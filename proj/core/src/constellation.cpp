// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/constellation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "doppler/error.hpp"
#include "doppler/rng.hpp"

namespace doppler {
namespace {

std::vector<std::complex<double>> square_qam(int side) {
  std::vector<std::complex<double>> points;
  points.reserve(static_cast<std::size_t>(side) * side);
  for (int i = 0; i < side; ++i)
    for (int q = 0; q < side; ++q) points.emplace_back(2.0 * i - (side - 1), 2.0 * q - (side - 1));
  return points;
}

std::vector<std::complex<double>> psk(int order) {
  std::vector<std::complex<double>> points;
  for (int i = 0; i < order; ++i) {
    const double phase = 2.0 * std::numbers::pi * i / order + (order == 4 ? std::numbers::pi / 4.0 : 0.0);
    points.push_back(std::polar(1.0, phase));
  }
  return points;
}

}  // namespace

std::complex<double> ConstellationSpec::draw(Rng& rng) const {
  if (is_continuous()) return rng.complex_normal(1.0);
  return points[rng.index(points.size())];
}

ConstellationSpec make_constellation(std::string name, std::vector<std::complex<double>> points) {
  require(!points.empty(), "constellation '" + name + "' has no points");
  double power = 0.0;
  for (const auto& c : points) power += std::norm(c);
  power /= static_cast<double>(points.size());
  require(power > 0.0, "constellation '" + name + "' has zero power");
  const double scale = 1.0 / std::sqrt(power);
  double fourth = 0.0;
  for (auto& c : points) {
    c *= scale;
    fourth += std::norm(c) * std::norm(c);
  }
  ConstellationSpec spec;
  spec.name = std::move(name);
  spec.omega_s = fourth / static_cast<double>(points.size());
  spec.points = std::move(points);
  return spec;
}

ConstellationSpec make_constellation(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::toupper(ch); });
  key.erase(std::remove(key.begin(), key.end(), '-'), key.end());
  if (key == "BPSK") return make_constellation("BPSK", {{1.0, 0.0}, {-1.0, 0.0}});
  if (key == "QPSK" || key == "4PSK") return make_constellation("QPSK", psk(4));
  if (key == "8PSK") return make_constellation("8PSK", psk(8));
  if (key == "16QAM") return make_constellation("16QAM", square_qam(4));
  if (key == "64QAM") return make_constellation("64QAM", square_qam(8));
  if (key == "UNIT") return make_constellation("UNIT", {{1.0, 0.0}});
  if (key == "GAUSS" || key == "GAUSSIAN") {
    ConstellationSpec spec;
    spec.name = "GAUSS";
    spec.omega_s = 2.0;
    return spec;
  }
  fail(ErrorCode::InvalidArgument, "unknown constellation '" + std::string(name) + "'");
}

}  // namespace doppler
