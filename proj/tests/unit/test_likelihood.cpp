// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "doppler/bessel.hpp"
#include "doppler/channel.hpp"
#include "doppler/error.hpp"
#include "doppler/harness.hpp"
#include "doppler/likelihood.hpp"
#include "doppler/rng.hpp"

using namespace doppler;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no doppler::Error thrown";
  return ErrorCode::InvalidArgument;
}

ScenarioConfig small_scenario(Rng& rng, int max_n = 8) {
  ScenarioSpec s;
  s.n_t = 1 + static_cast<int>(rng.index(2));
  s.n_r = 1 + static_cast<int>(rng.index(2));
  s.L = 1 + static_cast<int>(rng.index(3));
  s.N = s.L + 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_n - s.L)));
  s.f_D = 200.0 + 2000.0 * rng.uniform();
  s.T_s = 1e-4;
  s.snr_db = 5.0 + 10.0 * rng.uniform();
  s.constellation = rng.uniform() < 0.5 ? "16QAM" : "GAUSS";
  return make_scenario(s);
}

ScenarioConfig siso_flat(int N, double f_D, const char* constellation, double snr_db = 10.0) {
  ScenarioSpec s;
  s.n_t = 1;
  s.n_r = 1;
  s.L = 1;
  s.N = N;
  s.f_D = f_D;
  s.snr_db = snr_db;
  s.constellation = constellation;
  return make_scenario(s);
}

// Real-form covariance built from the complex covariance
// R_{kk'} = sum_m sum_l sigma^2 J0(a f |k-k'|) s_{k-l} conj(s_{k'-l}) + sigma_w^2 delta.
Eigen::MatrixXd oracle_sigma(const SymbolBlock& pilots, const ScenarioConfig& c, int n) {
  const int N = c.N;
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(N, N);
  const double a = 2.0 * std::numbers::pi * c.T_s * c.f_D;
  for (int k = 1; k <= N; ++k)
    for (int kp = 1; kp <= N; ++kp) {
      cplx acc{0.0, 0.0};
      for (int m = 0; m < c.n_t; ++m)
        for (int l = 1; l <= c.L; ++l)
          acc += c.tap_variance(m, n, l - 1) * pilots.lagged(m, k, l) * std::conj(pilots.lagged(m, kp, l));
      R(k - 1, kp - 1) = acc * bessel_j0(a * std::abs(k - kp)) + (k == kp ? c.noise_vars[n] : 0.0);
    }
  Eigen::MatrixXd out(2 * N, 2 * N);
  out << 0.5 * R.real(), -0.5 * R.imag(), 0.5 * R.imag(), 0.5 * R.real();
  return out;
}

double dense_log_pdf(const Eigen::VectorXd& r, const Eigen::MatrixXd& sigma) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
  return -0.5 * r.dot(lu.inverse() * r) - 0.5 * std::log(lu.determinant()) - 0.5 * r.size() * kLog2Pi;
}

CovarianceModel model_of(Eigen::MatrixXd sigma, Eigen::MatrixXd dsigma) {
  CovarianceModel cov;
  cov.N = static_cast<int>(sigma.rows() / 2);
  cov.sigma = {std::move(sigma)};
  cov.dsigma = {std::move(dsigma)};
  return cov;
}

StackedObservation obs_of(Eigen::VectorXd r) {
  StackedObservation o;
  o.n_r = 1;
  o.N = static_cast<int>(r.size() / 2);
  o.r = std::move(r);
  return o;
}

}  // namespace

TEST(CovarianceDa, MatchesComplexFormOracle) {
  Rng rng(301);
  for (int t = 0; t < 20; ++t) {
    const ScenarioConfig c = small_scenario(rng);
    const SymbolBlock pilots = generate_symbols(c, rng.split({static_cast<std::uint64_t>(t)}));
    const CovarianceModel cov = build_cov_da(pilots, ModelParams::from(c), c.N);
    ASSERT_EQ(static_cast<int>(cov.sigma.size()), c.n_r);
    for (int n = 0; n < c.n_r; ++n) {
      const Eigen::MatrixXd expect = oracle_sigma(pilots, c, n);
      EXPECT_LT((cov.sigma[n] - expect).cwiseAbs().maxCoeff(), 1e-14);
      EXPECT_EQ((cov.sigma[n] - cov.sigma[n].transpose()).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(CovarianceDa, DiagonalIsMeanPower) {
  ScenarioSpec s;
  s.N = 12;
  s.f_D = 900.0;
  const ScenarioConfig c = make_scenario(s);
  const SymbolBlock pilots = generate_symbols(c, Rng(302));
  const CovarianceModel cov = build_cov_da(pilots, ModelParams::from(c), c.N);
  for (int n = 0; n < c.n_r; ++n)
    for (int k = 1; k <= c.N; ++k) {
      double p = 0.0;
      for (int m = 0; m < c.n_t; ++m)
        for (int l = 1; l <= c.L; ++l) p += c.tap_variance(m, n, l - 1) * std::norm(pilots.lagged(m, k, l));
      EXPECT_NEAR(cov.sigma[n](k - 1, k - 1), 0.5 * p + 0.5 * c.noise_vars[n], 1e-15);
      EXPECT_NEAR(cov.sigma[n](c.N + k - 1, c.N + k - 1), 0.5 * p + 0.5 * c.noise_vars[n], 1e-15);
    }
}

TEST(CovarianceDa, SampleCovarianceAgrees) {
  ScenarioSpec s;
  s.n_t = 2;
  s.n_r = 1;
  s.L = 2;
  s.N = 4;
  s.f_D = 2000.0;
  s.T_s = 1e-4;
  s.snr_db = 5.0;
  s.constellation = "16QAM";
  const ScenarioConfig c = make_scenario(s);
  const SymbolBlock pilots = generate_symbols(c, Rng(303));
  const Eigen::MatrixXd sigma = build_cov_da(pilots, ModelParams::from(c), c.N, false).sigma[0];
  const int reals = 40000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(8, 8);
  for (int t = 0; t < reals; ++t) {
    const Rng rng(derive_seed(304, {static_cast<std::uint64_t>(t)}));
    const auto fading = generate_fading(c, rng.split({1}));
    const auto rx = generate_received(c, fading, pilots, rng.split({2}));
    const Eigen::VectorXd r = StackedObservation::from(rx).r;
    acc += r * r.transpose();
  }
  acc /= reals;
  EXPECT_LT((acc - sigma).cwiseAbs().maxCoeff(), 0.05 * sigma.diagonal().maxCoeff());
}

// Five-point central difference of a matrix- or scalar-valued function of f_D.
template <class F>
auto central_difference(F&& fn, double f, double h) -> std::decay_t<decltype(fn(f))> {
  return (fn(f - 2 * h) - 8.0 * fn(f - h) + 8.0 * fn(f + h) - fn(f + 2 * h)) / (12.0 * h);
}

TEST(CovarianceDa, DerivativeMatchesFiniteDifference) {
  Rng rng(305);
  for (int t = 0; t < 20; ++t) {
    const ScenarioConfig c = small_scenario(rng, 20);
    const SymbolBlock pilots = generate_symbols(c, rng.split({static_cast<std::uint64_t>(t)}));
    const ModelParams p = ModelParams::from(c);
    const CovarianceModel cov = build_cov_da(pilots, p, c.N);
    for (int n = 0; n < c.n_r; ++n) {
      const auto sigma_at = [&](double f) -> Eigen::MatrixXd {
        ModelParams q = p;
        q.f_D = f;
        return build_cov_da(pilots, q, c.N, false).sigma[n];
      };
      const double h = 1e-4 * c.f_D;
      const Eigen::MatrixXd fd = central_difference(sigma_at, c.f_D, h);
      const Eigen::MatrixXd& d = cov.dsigma[n];
      const double floor = 1e-9 * d.cwiseAbs().maxCoeff();
      // Rounding in the stencil limits its resolution to about eps * |Sigma| / h.
      const double resolution = 100.0 * std::numeric_limits<double>::epsilon() * cov.sigma[n].cwiseAbs().maxCoeff() / h;
      for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
          EXPECT_LE(std::fabs(fd(i, j) - d(i, j)), 1e-6 * std::max(std::fabs(d(i, j)), floor) + resolution) << "t=" << t;
    }
  }
}

TEST(CovarianceDa, DerivativeVanishesAtZeroDoppler) {
  const ScenarioConfig c = siso_flat(6, 0.0, "16QAM");
  const SymbolBlock pilots = generate_symbols(c, Rng(306));
  const CovarianceModel cov = build_cov_da(pilots, ModelParams::from(c), c.N);
  EXPECT_EQ(cov.dsigma[0].cwiseAbs().maxCoeff(), 0.0);
}

TEST(LogPdf, UnitCovarianceAtOrigin) {
  const CovarianceModel cov = model_of(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_NEAR(log_pdf_gaussian(obs_of(Eigen::VectorXd::Zero(2)), cov), -kLog2Pi, 1e-15);
}

TEST(LogPdf, ScaledCovarianceClosedForm) {
  Eigen::VectorXd r(6);
  r << 0.3, -1.2, 0.5, 2.0, -0.1, 0.7;
  const StackedObservation o = obs_of(r);
  const double a = log_pdf_gaussian(o, model_of(Eigen::MatrixXd::Identity(6, 6), Eigen::MatrixXd::Zero(6, 6)));
  const double b = log_pdf_gaussian(o, model_of(4.0 * Eigen::MatrixXd::Identity(6, 6), Eigen::MatrixXd::Zero(6, 6)));
  EXPECT_NEAR(b - a, -0.5 * r.squaredNorm() * (0.25 - 1.0) - 0.5 * 6.0 * std::log(4.0), 1e-13);
}

TEST(LogPdf, MatchesDenseOracle) {
  Rng rng(307);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd g(6, 6);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    const Eigen::MatrixXd sigma = g * g.transpose() + 0.5 * Eigen::MatrixXd::Identity(6, 6);
    Eigen::VectorXd r(6);
    for (Eigen::Index i = 0; i < 6; ++i) r(i) = rng.normal();
    EXPECT_NEAR(log_pdf_gaussian(obs_of(r), model_of(sigma, Eigen::MatrixXd::Zero(6, 6))), dense_log_pdf(r, sigma), 1e-9);
  }
}

TEST(LogPdf, RejectsIndefiniteCovariance) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  sigma(1, 1) = -1.0;
  EXPECT_EQ(code_of([&] { log_pdf_gaussian(obs_of(Eigen::VectorXd::Zero(2)), model_of(sigma, sigma)); }),
            ErrorCode::NumericalFailure);
}

TEST(FisherDa, HandComputedTwoByTwo) {
  Eigen::MatrixXd sigma(2, 2), d(2, 2);
  sigma << 2.0, 0.5, 0.5, 1.0;
  d << 1.0, 0.0, 0.0, -1.0;
  // inv(sigma) d = [[1, .5], [-.5, -2]] / 1.75, its square has trace 4.5 / 1.75^2.
  EXPECT_NEAR(fisher_info_da(model_of(sigma, d)), 0.5 * 4.5 / (1.75 * 1.75), 1e-14);
}

TEST(FisherDa, ZeroWithoutDerivativeAndNonnegative) {
  EXPECT_EQ(fisher_info_da(model_of(Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Zero(4, 4))), 0.0);
  Rng rng(308);
  for (int t = 0; t < 100; ++t) {
    const ScenarioConfig c = small_scenario(rng, 6);
    const SymbolBlock pilots = generate_symbols(c, rng.split({static_cast<std::uint64_t>(t)}));
    EXPECT_GE(fisher_info_da(build_cov_da(pilots, ModelParams::from(c), c.N)), 0.0);
  }
}

TEST(CrlbDa, InverseInformation) {
  EXPECT_DOUBLE_EQ(crlb_da(model_of(Eigen::MatrixXd::Identity(2, 2), 2.0 * Eigen::MatrixXd::Identity(2, 2))), 0.25);
}

TEST(CrlbDa, SingleSampleIsUnbounded) {
  SymbolBlock pilots;
  pilots.n_t = 1;
  pilots.L = 1;
  pilots.N = 1;
  pilots.symbols = {cplx(1.0, 0.0)};
  ModelParams p;
  p.f_D = 500.0;
  p.noise_vars = {0.1};
  p.delay_profile = {1.0};
  p.symbol_powers = {1.0};
  EXPECT_EQ(code_of([&] { crlb_da(build_cov_da(pilots, p, 1)); }), ErrorCode::UnboundedVariance);
}

TEST(CrlbDa, LongerWindowTightensBound) {
  ScenarioConfig c = siso_flat(100, 1000.0, "16QAM");
  const SymbolBlock full = generate_symbols(c, Rng(309));
  SymbolBlock half = full;
  half.N = 50;
  half.symbols.resize(50);
  const ModelParams p = ModelParams::from(c);
  EXPECT_LT(crlb_da(build_cov_da(full, p, 100)), crlb_da(build_cov_da(half, p, 50)));
}

TEST(ScoreDa, MatchesFiniteDifference) {
  Rng rng(310);
  for (int t = 0; t < 20; ++t) {
    const ScenarioConfig c = small_scenario(rng, 20);
    const Rng trial = rng.split({static_cast<std::uint64_t>(t)});
    const Simulation sim = simulate(c, trial);
    const StackedObservation o = StackedObservation::from(sim.received);
    ModelParams p = ModelParams::from(c);
    const double f0 = c.f_D * (0.7 + 0.6 * rng.uniform());
    p.f_D = f0;
    const double s = score_da(o, build_cov_da(sim.symbols, p, c.N));
    const auto loglik_at = [&](double f) {
      ModelParams q = p;
      q.f_D = f;
      return log_pdf_gaussian(o, build_cov_da(sim.symbols, q, c.N, false));
    };
    const double fd = central_difference(loglik_at, f0, 1e-4 * f0);
    EXPECT_LE(std::fabs(fd - s), 1e-5 * std::fabs(s)) << "t=" << t << " fd=" << fd << " s=" << s;
  }
}

TEST(ScoreDa, ZeroMeanAtTruth) {
  const ScenarioConfig c = siso_flat(20, 1500.0, "16QAM");
  const SymbolBlock pilots = generate_symbols(c, Rng(311));
  const CovarianceModel cov = build_cov_da(pilots, ModelParams::from(c), c.N);
  const int reals = 500;
  double sum = 0.0, sq = 0.0;
  for (int t = 0; t < reals; ++t) {
    const Rng rng(derive_seed(312, {static_cast<std::uint64_t>(t)}));
    const auto rx = generate_received(c, generate_fading(c, rng.split({1})), pilots, rng.split({2}));
    const double s = score_da(StackedObservation::from(rx), cov);
    sum += s;
    sq += s * s;
  }
  const double mean = sum / reals;
  const double sd = std::sqrt(sq / reals - mean * mean);
  EXPECT_LT(std::fabs(mean), 3.5 * sd / std::sqrt(reals));
  // Var(score) equals the Fisher information.
  EXPECT_NEAR(sd * sd / fisher_info_da(cov), 1.0, 0.25);
}

TEST(ScoreDa, ZeroWithoutDerivative) {
  Eigen::VectorXd r(4);
  r << 1.0, 2.0, -1.0, 0.5;
  EXPECT_EQ(score_da(obs_of(r), model_of(Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Zero(4, 4))), 0.0);
}

TEST(MleDa, MultipleStartsNeverWorseAndStationary) {
  const ScenarioConfig c = siso_flat(120, 1000.0, "16QAM");
  const ModelParams p = ModelParams::from(c);
  SearchSpec search;
  for (int t = 0; t < 4; ++t) {
    const Simulation sim = simulate(c, Rng(derive_seed(313, {static_cast<std::uint64_t>(t)})));
    const StackedObservation o = StackedObservation::from(sim.received);
    const EstimateReport miv = mle_da(o, sim.symbols, p, search, 8);
    const EstimateReport siv = mle_da(o, sim.symbols, p, search, 1);
    EXPECT_EQ(miv.method, EstimatorMethod::DaMle);
    EXPECT_EQ(siv.diagnostics.starts, 1);
    EXPECT_GE(miv.diagnostics.log_likelihood, siv.diagnostics.log_likelihood - 1e-9);
    EXPECT_GE(miv.f_hat, search.f_l);
    EXPECT_LE(miv.f_hat, search.f_h);
    for (const auto& [f, v] : miv.ssr_curve) {
      EXPECT_GE(f, search.f_l);
      EXPECT_LE(f, search.f_h);
    }
    if (miv.diagnostics.converged && miv.f_hat > search.f_l && miv.f_hat < search.f_h) {
      ModelParams at = p;
      at.f_D = miv.f_hat;
      const LikelihoodTerms terms = evaluate_da(o, build_cov_da(sim.symbols, at, c.N));
      EXPECT_LE(std::fabs(terms.score), 2.0 * search.delta_fine * terms.fisher_info);
    }
  }
}

TEST(MleDa, GridAndScoringAgree) {
  const ScenarioConfig c = siso_flat(150, 800.0, "16QAM", 20.0);
  const ModelParams p = ModelParams::from(c);
  const Simulation sim = simulate(c, Rng(314));
  const StackedObservation o = StackedObservation::from(sim.received);
  const EstimateReport grid = mle_da_grid(o, sim.symbols, p, SearchSpec{});
  const EstimateReport scoring = mle_da(o, sim.symbols, p, SearchSpec{}, 8);
  EXPECT_LE(std::fabs(grid.f_hat - scoring.f_hat), 2.0);
  EXPECT_GE(grid.diagnostics.log_likelihood, scoring.diagnostics.log_likelihood - 1e-3);
}

TEST(Nda, SinglePointConstellationEqualsDa) {
  ScenarioConfig c = siso_flat(6, 1500.0, "UNIT");
  c.n_r = 2;
  c.noise_vars = {0.05, 0.2};
  c.delay_profile = {1.0, 0.5};
  const Simulation sim = simulate(c, Rng(315));
  const StackedObservation o = StackedObservation::from(sim.received);
  ModelParams p = ModelParams::from(c);
  for (double f : {300.0, 1500.0, 2400.0}) {
    p.f_D = f;
    const double da = log_pdf_gaussian(o, build_cov_da(sim.symbols, p, c.N, false));
    EXPECT_NEAR(nda_loglik(o, c.constellation, p, f), da, 1e-10 * std::fabs(da));
  }
}

TEST(Nda, BpskSingleSymbolTwoTermSum) {
  ScenarioConfig c = siso_flat(2, 700.0, "BPSK");
  c.N = 1;
  ModelParams p = ModelParams::from(c);
  p.noise_vars = {0.3};
  p.symbol_powers = {0.5};
  Eigen::VectorXd r(2);
  r << 0.4, -0.9;
  const StackedObservation o = obs_of(r);
  // per real dimension: (sigma_h^2 sigma_s^2 |s|^2 + sigma_w^2) / 2, the same for s = +1 and s = -1
  const double var = 0.5 * (1.0 * 0.5 + 0.3);
  const double each = -0.5 * r.squaredNorm() / var - std::log(var) - kLog2Pi;
  const double expected = std::log(0.5 * std::exp(each) + 0.5 * std::exp(each));
  EXPECT_NEAR(nda_loglik(o, c.constellation, p, 700.0), expected, 1e-12);
}

TEST(Nda, EnumeratedMixtureWithLogSumExp) {
  ScenarioConfig c = siso_flat(3, 900.0, "BPSK", 15.0);
  c.T_s = 1e-4;
  c.L = 2;
  c.delay_profile = {0.7, 0.3};
  const ModelParams p = ModelParams::from(c);
  const Simulation sim = simulate(c, Rng(316));
  for (double scale : {1.0, 300.0}) {
    StackedObservation o = StackedObservation::from(sim.received);
    o.r *= scale;
    std::vector<double> terms;
    for (int bits = 0; bits < 16; ++bits) {
      SymbolBlock s;
      s.n_t = 1;
      s.L = 2;
      s.N = 3;
      for (int j = 0; j < 4; ++j) s.symbols.push_back(std::sqrt(p.symbol_powers[0]) * cplx((bits >> j) & 1 ? -1.0 : 1.0, 0.0));
      terms.push_back(log_pdf_gaussian(o, build_cov_da(s, p, 3, false)));
    }
    const double peak = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    const double expected = peak + std::log(acc / 16.0);
    if (scale > 1.0) {
      EXPECT_LT(peak, -800.0);
    }
    const double got = nda_loglik(o, c.constellation, p, c.f_D);
    EXPECT_TRUE(std::isfinite(got));
    EXPECT_NEAR(got, expected, 1e-10 * std::fabs(expected));
  }
}

TEST(Nda, EnumerationCap) {
  ScenarioConfig c = siso_flat(20, 900.0, "BPSK");
  const ModelParams p = ModelParams::from(c);
  EXPECT_NO_THROW(NdaMixture(c.constellation, p, 20));
  EXPECT_EQ(NdaMixture(c.constellation, p, 20).terms(), 1u << 20);
  EXPECT_EQ(code_of([&] { NdaMixture(c.constellation, p, 21); }), ErrorCode::IntractableEnumeration);
  EXPECT_EQ(code_of([&] { NdaMixture(make_constellation("GAUSS"), p, 4); }), ErrorCode::InvalidArgument);
}

TEST(MleNda, SinglePointConstellationMatchesDaGrid) {
  const ScenarioConfig c = siso_flat(8, 1200.0, "UNIT");
  const ModelParams p = ModelParams::from(c);
  SearchSpec search;
  for (int t = 0; t < 3; ++t) {
    const Simulation sim = simulate(c, Rng(derive_seed(317, {static_cast<std::uint64_t>(t)})));
    const StackedObservation o = StackedObservation::from(sim.received);
    EXPECT_EQ(mle_nda(o, c.constellation, p, search).f_hat, mle_da_grid(o, sim.symbols, p, search).f_hat);
  }
}

TEST(MleNda, BatchMatchesSingleAndBeatsTruth) {
  const ScenarioConfig c = siso_flat(6, 1000.0, "BPSK", 20.0);
  const ModelParams p = ModelParams::from(c);
  SearchSpec search;
  std::vector<StackedObservation> obs;
  for (int t = 0; t < 5; ++t) obs.push_back(StackedObservation::from(simulate(c, Rng(derive_seed(318, {static_cast<std::uint64_t>(t)}))).received));
  const auto batch = mle_nda_batch(obs, c.constellation, p, search);
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const EstimateReport single = mle_nda(obs[j], c.constellation, p, search);
    EXPECT_EQ(batch[j].f_hat, single.f_hat);
    EXPECT_EQ(batch[j].method, EstimatorMethod::NdaMle);
    EXPECT_GE(batch[j].diagnostics.log_likelihood, nda_loglik(obs[j], c.constellation, p, 1000.0) - 1e-9);
  }
}

TEST(CrlbNda, SinglePointConstellationMatchesDa) {
  const ScenarioConfig c = siso_flat(8, 1000.0, "UNIT");
  Rng rng(319);
  const BoundReport nda = crlb_nda_mc(c, 2000, rng);
  SymbolBlock ones = generate_symbols(c, Rng(1));
  const double info = fisher_info_da(build_cov_da(ones, ModelParams::from(c), c.N));
  EXPECT_EQ(nda.mode, BoundMode::Nda);
  EXPECT_EQ(nda.mc_samples, 2000);
  ASSERT_TRUE(nda.crlb.has_value());
  EXPECT_LE(std::fabs(nda.fisher_info - info), 2.0 * nda.mc_stderr) << nda.fisher_info << " vs " << info;
}

TEST(CrlbNda, NotBelowDaBoundAndStepRobust) {
  const ScenarioConfig c = siso_flat(8, 1500.0, "BPSK", 15.0);
  Rng a(320), b(320);
  const BoundReport coarse = crlb_nda_mc(c, 400, a, 1e-3);
  const BoundReport fine = crlb_nda_mc(c, 400, b, 5e-4);
  EXPECT_NEAR(fine.fisher_info / coarse.fisher_info, 1.0, 0.01);
  // BPSK pilots only flip signs, which leaves the DA information unchanged.
  const double da = fisher_info_da(build_cov_da(generate_symbols(c, Rng(2)), ModelParams::from(c), c.N));
  ASSERT_TRUE(coarse.crlb.has_value());
  EXPECT_GE(*coarse.crlb, 1.0 / da - 2.0 * coarse.mc_stderr / (coarse.fisher_info * coarse.fisher_info));
}

TEST(CrlbDaScenario, ReportsPositiveBound) {
  const ScenarioConfig c = siso_flat(40, 1000.0, "16QAM");
  Rng rng(321);
  const BoundReport r = crlb_da_scenario(c, rng);
  EXPECT_EQ(r.mode, BoundMode::Da);
  ASSERT_TRUE(r.crlb.has_value());
  EXPECT_NEAR(*r.crlb * r.fisher_info, 1.0, 1e-12);
}
