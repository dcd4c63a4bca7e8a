// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/channel.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <fftw3.h>

#include "doppler/bessel.hpp"
#include "doppler/error.hpp"
#include "doppler/rng.hpp"

namespace doppler {

void ScenarioConfig::validate() const {
  require(n_t >= 1 && n_r >= 1 && L >= 1, "antenna and tap counts must be >= 1");
  require(N > L, "observation window N must exceed the channel length L");
  require(f_D >= 0.0 && std::isfinite(f_D), "f_D must be finite and >= 0");
  require(T_s > 0.0, "T_s must be positive");
  require(symbol_powers.size() == static_cast<std::size_t>(n_t), "symbol_powers must have n_t entries");
  require(noise_vars.size() == static_cast<std::size_t>(n_r), "noise_vars must have n_r entries");
  require(delay_profile.size() == static_cast<std::size_t>(n_t) * n_r * L,
          "delay_profile must have n_t * n_r * L entries");
  for (double v : symbol_powers) require(v >= 0.0, "symbol powers must be >= 0");
  for (double v : noise_vars) require(v >= 0.0, "noise variances must be >= 0");
  for (double v : delay_profile) require(v >= 0.0, "tap variances must be >= 0");
}

std::vector<double> exponential_delay_profile(int L, double l_rms) {
  require(L >= 1, "exponential_delay_profile: L must be >= 1");
  require(l_rms > 0.0, "exponential_delay_profile: l_rms must be positive");
  std::vector<double> profile(static_cast<std::size_t>(L));
  double total = 0.0;
  for (int l = 0; l < L; ++l) {
    profile[l] = std::exp(-l_rms * (l + 1) / L);
    total += profile[l];
  }
  for (double& v : profile) v /= total;
  return profile;
}

Eigen::MatrixXd build_tap_covariance(double f_D, double T_s, int N, double sigma_h2) {
  require(N >= 1, "build_tap_covariance: N must be >= 1");
  const double a = 2.0 * std::numbers::pi * f_D * T_s;
  std::vector<double> row(static_cast<std::size_t>(N));
  for (int u = 0; u < N; ++u) row[u] = sigma_h2 * bessel_j0(a * u);
  Eigen::MatrixXd cov(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) cov(i, j) = row[static_cast<std::size_t>(std::abs(i - j))];
  return cov;
}

Eigen::MatrixXd jakes_cholesky_factor(double doppler_rate, int N) {
  Eigen::MatrixXd cov = build_tap_covariance(doppler_rate, 1.0, N, 1.0);
  for (double jitter : {1e-10, 1e-8}) {
    Eigen::MatrixXd jittered = cov;
    jittered.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  std::ostringstream msg;
  msg << "Cholesky of the J0 covariance failed after jitter (f_D*T_s = " << doppler_rate << ", N = " << N << ")";
  fail(ErrorCode::NumericalFailure, msg.str());
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

// Most recently used Cholesky factor. Sweeps reuse one (rate, N) pair for
// every trial at a point.
std::shared_ptr<const Eigen::MatrixXd> cached_cholesky_factor(double doppler_rate, int N) {
  static std::mutex mutex;
  static double cached_rate = -1.0;
  static int cached_n = 0;
  static std::shared_ptr<const Eigen::MatrixXd> cached;
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (cached && cached_rate == doppler_rate && cached_n == N) return cached;
  }
  auto factor = std::make_shared<const Eigen::MatrixXd>(jakes_cholesky_factor(doppler_rate, N));
  std::lock_guard<std::mutex> lock(mutex);
  cached_rate = doppler_rate;
  cached_n = N;
  cached = factor;
  return factor;
}

// Four times the smallest power of two covering 2(N - 1) lags.
int embedding_size(int N) {
  int size = 2;
  while (size < 2 * (N - 1)) size *= 2;
  return 4 * size;
}

// Square roots of the (clipped) eigenvalues of the circulant embedding of
// the unit J0 autocorrelation, pre-divided by sqrt(M). Lags below N are
// exact; beyond N the sequence is rolled off with a raised cosine that
// reaches zero at M/2.
std::vector<double> embedding_amplitudes(double doppler_rate, int N) {
  const int M = embedding_size(N);
  const int half = M / 2;
  const double a = 2.0 * std::numbers::pi * doppler_rate;
  fftw_complex* buffer = fftw_alloc_complex(static_cast<std::size_t>(M));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(M, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (int j = 0; j < M; ++j) {
    const int d = std::min(j, M - j);
    double c = bessel_j0(a * d);
    if (d >= N) c *= 0.5 * (1.0 + std::cos(std::numbers::pi * (d - N) / static_cast<double>(half - N)));
    buffer[j][0] = c;
    buffer[j][1] = 0.0;
  }
  fftw_execute(plan);
  std::vector<double> amplitude(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) amplitude[j] = std::sqrt(std::max(buffer[j][0], 0.0) / M);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buffer);
  return amplitude;
}

class CirculantSampler {
 public:
  CirculantSampler(double doppler_rate, int N)
      : N_(N), M_(embedding_size(N)), amplitude_(embedding_amplitudes(doppler_rate, N)) {
    buffer_ = fftw_alloc_complex(static_cast<std::size_t>(M_));
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(M_, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~CirculantSampler() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(buffer_);
  }
  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  void draw(Rng& rng, double sigma, cplx* out) {
    for (int j = 0; j < M_; ++j) {
      const cplx z = rng.complex_normal(1.0) * (amplitude_[j] * sigma);
      buffer_[j][0] = z.real();
      buffer_[j][1] = z.imag();
    }
    fftw_execute(plan_);
    for (int k = 0; k < N_; ++k) out[k] = {buffer_[k][0], buffer_[k][1]};
  }

 private:
  int N_;
  int M_;
  std::vector<double> amplitude_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan plan_{};
};

}  // namespace

FadingRealization generate_fading(const ScenarioConfig& config, const Rng& rng, FadingMethod method) {
  config.validate();
  const int N = config.N;
  FadingRealization fading;
  fading.n_t = config.n_t;
  fading.n_r = config.n_r;
  fading.L = config.L;
  fading.N = N;
  fading.taps.assign(static_cast<std::size_t>(config.n_t) * config.n_r * config.L * N, cplx{});

  const double rate = config.doppler_rate();
  if (method == FadingMethod::Automatic)
    method = N <= kCholeskyMaxN ? FadingMethod::Cholesky : FadingMethod::CirculantEmbedding;

  auto for_each_tap = [&](auto&& draw) {
    for (int m = 0; m < config.n_t; ++m)
      for (int n = 0; n < config.n_r; ++n)
        for (int l = 0; l < config.L; ++l) {
          Rng stream = rng.split({1, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(l)});
          draw(stream, std::sqrt(config.tap_variance(m, n, l)), &fading.at(m, n, l, 0));
        }
  };

  if (rate == 0.0) {
    // Rank-one covariance: one draw held for the whole window.
    for_each_tap([&](Rng& stream, double sigma, cplx* out) {
      const cplx h = stream.complex_normal(1.0) * sigma;
      std::fill(out, out + N, h);
    });
  } else if (method == FadingMethod::Cholesky) {
    const auto shared_factor = cached_cholesky_factor(rate, N);
    const Eigen::MatrixXd& factor = *shared_factor;
    Eigen::VectorXd re(N);
    Eigen::VectorXd im(N);
    for_each_tap([&](Rng& stream, double sigma, cplx* out) {
      const double scale = sigma * std::sqrt(0.5);
      for (int k = 0; k < N; ++k) {
        re[k] = stream.normal();
        im[k] = stream.normal();
      }
      const Eigen::VectorXd x = factor.triangularView<Eigen::Lower>() * re;
      const Eigen::VectorXd y = factor.triangularView<Eigen::Lower>() * im;
      for (int k = 0; k < N; ++k) out[k] = {scale * x[k], scale * y[k]};
    });
  } else {
    CirculantSampler sampler(rate, N);
    for_each_tap([&](Rng& stream, double sigma, cplx* out) { sampler.draw(stream, sigma, out); });
  }
  return fading;
}

SymbolBlock generate_symbols(const ScenarioConfig& config, const Rng& rng) {
  config.validate();
  SymbolBlock block;
  block.n_t = config.n_t;
  block.L = config.L;
  block.N = config.N;
  block.symbols.resize(static_cast<std::size_t>(config.n_t) * block.span());
  for (int m = 0; m < config.n_t; ++m) {
    Rng stream = rng.split({2, static_cast<std::uint64_t>(m)});
    const double scale = std::sqrt(config.symbol_powers[m]);
    for (int j = 0; j < block.span(); ++j) block.at(m, j) = scale * config.constellation.draw(stream);
  }
  return block;
}

ReceivedBlock generate_received(const ScenarioConfig& config, const FadingRealization& fading,
                                const SymbolBlock& symbols, const Rng& rng) {
  config.validate();
  require(fading.n_t == config.n_t && fading.n_r == config.n_r && fading.L == config.L && fading.N == config.N,
          "generate_received: fading dimensions do not match the scenario");
  require(symbols.n_t == config.n_t && symbols.L == config.L && symbols.N == config.N,
          "generate_received: symbol dimensions do not match the scenario");
  const int N = config.N;
  ReceivedBlock block;
  block.n_r = config.n_r;
  block.N = N;
  block.samples.assign(static_cast<std::size_t>(config.n_r) * N, cplx{});
  for (int n = 0; n < config.n_r; ++n) {
    cplx* r = block.antenna(n);
    for (int m = 0; m < config.n_t; ++m)
      for (int l = 0; l < config.L; ++l) {
        const cplx* h = fading.sequence(m, n, l);
        // k is 0-based here; s_{k-l} with 1-based k, l sits at index k + L - 1 - l.
        const cplx* s = &symbols.at(m, config.L - 1 - l);
        for (int k = 0; k < N; ++k) r[k] += h[k] * s[k];
      }
    Rng stream = rng.split({3, static_cast<std::uint64_t>(n)});
    const double noise = config.noise_vars[n];
    for (int k = 0; k < N; ++k) r[k] += stream.complex_normal(noise);
  }
  return block;
}

Simulation simulate(const ScenarioConfig& config, const Rng& rng, FadingMethod method) {
  Simulation sim;
  sim.fading = generate_fading(config, rng, method);
  sim.symbols = generate_symbols(config, rng);
  sim.received = generate_received(config, sim.fading, sim.symbols, rng);
  return sim;
}

ReceivedBlock apply_cfo(const ReceivedBlock& block, double omega) {
  ReceivedBlock out = block;
  if (omega == 0.0) return out;
  for (int n = 0; n < block.n_r; ++n) {
    cplx* r = out.antenna(n);
    for (int k = 0; k < block.N; ++k) r[k] *= std::polar(1.0, omega * (k + 1));
  }
  return out;
}

}  // namespace doppler
