// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace doppler {

/// SplitMix64 finalizer; the building block of stream derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from a parent seed and a path of integer tags.
/// derive_seed(s, {a, b}) == derive_seed(derive_seed(s, {a}), {b}).
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept;

/// Seedable generator with hierarchical splitting.
///
/// split() depends only on this generator's seed, never on how many draws
/// were taken from it, so the stream handed to (m, n, l) is the same no
/// matter which other streams were consumed first.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  Rng split(std::initializer_list<std::uint64_t> path) const { return Rng(derive_seed(seed_, path)); }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

  /// Circular complex normal with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance = 1.0);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace doppler
