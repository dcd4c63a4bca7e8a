// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "doppler/bessel.hpp"
#include "doppler/error.hpp"
#include "doppler/rng.hpp"

namespace doppler {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

struct BesselTable {
  std::vector<double> j0;
  std::vector<double> dj0;  ///< d/df_D of J0(2 pi f_D T_s u)
};

BesselTable bessel_table(double f_D, double T_s, int N, bool with_derivative) {
  const double a = 2.0 * std::numbers::pi * T_s;
  BesselTable t;
  t.j0.resize(static_cast<std::size_t>(N));
  if (with_derivative) t.dj0.resize(static_cast<std::size_t>(N));
  for (int u = 0; u < N; ++u) {
    t.j0[u] = bessel_j0(a * f_D * u);
    if (with_derivative) t.dj0[u] = -a * u * bessel_j1(a * f_D * u);
  }
  return t;
}

/// G_{kk'} = sum_m sum_l sigma_h^2 s_{k-l} conj(s_{k'-l}) for antenna n.
Eigen::MatrixXcd symbol_gram(const SymbolBlock& pilots, const ModelParams& params, int n, int N) {
  const int cols = params.n_t * params.L;
  Eigen::MatrixXcd s(N, cols);
  for (int m = 0; m < params.n_t; ++m)
    for (int l = 0; l < params.L; ++l) {
      const double g = std::sqrt(params.tap_variance(m, n, l));
      for (int k = 0; k < N; ++k) s(k, m * params.L + l) = g * pilots.at(m, k - l + params.L - 1);
    }
  return s * s.adjoint();
}

/// [[A, X], [X^T, A]] with A = Re(G) c / 2 and X = -Im(G) c / 2, c the
/// correlation table indexed by |k - k'|.
Eigen::MatrixXd real_form(const Eigen::MatrixXcd& gram, const std::vector<double>& table, double diagonal) {
  const Eigen::Index N = gram.rows();
  Eigen::MatrixXd out(2 * N, 2 * N);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = 0; i < N; ++i) {
      const double c = 0.5 * table[static_cast<std::size_t>(std::abs(i - j))];
      const double a = c * gram(i, j).real();
      const double x = -c * gram(i, j).imag();
      out(i, j) = a;
      out(i + N, j + N) = a;
      out(i, j + N) = x;
      out(i + N, j) = -x;
    }
  for (Eigen::Index i = 0; i < 2 * N; ++i) out(i, i) += diagonal;
  return out;
}

CovarianceModel assemble(const SymbolBlock& pilots, const ModelParams& params, int N, const BesselTable& table) {
  CovarianceModel cov;
  cov.N = N;
  cov.f_D = params.f_D;
  cov.sigma.reserve(static_cast<std::size_t>(params.n_r));
  for (int n = 0; n < params.n_r; ++n) {
    const Eigen::MatrixXcd gram = symbol_gram(pilots, params, n, N);
    cov.sigma.push_back(real_form(gram, table.j0, 0.5 * params.noise_vars[n]));
    if (!table.dj0.empty()) cov.dsigma.push_back(real_form(gram, table.dj0, 0.0));
  }
  return cov;
}

struct BlockFactor {
  Eigen::MatrixXd l;
  double half_logdet = 0.0;
};

BlockFactor factor(const Eigen::MatrixXd& sigma) {
  const double scale = sigma.trace() / static_cast<double>(sigma.rows());
  for (double jitter : {0.0, 1e-10, 1e-8}) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (jitter == 0.0) {
      llt.compute(sigma);
    } else {
      Eigen::MatrixXd jittered = sigma;
      jittered.diagonal().array() += jitter * scale;
      llt.compute(jittered);
    }
    if (llt.info() != Eigen::Success) continue;
    BlockFactor f;
    f.l = llt.matrixL();
    for (Eigen::Index i = 0; i < f.l.rows(); ++i) f.half_logdet += std::log(f.l(i, i));
    if (std::isfinite(f.half_logdet)) return f;
  }
  fail(ErrorCode::NumericalFailure, "covariance block is not positive definite after jitter");
}

LikelihoodTerms evaluate_block(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd* dsigma,
                               const Eigen::Ref<const Eigen::VectorXd>& r) {
  const BlockFactor f = factor(sigma);
  const auto lower = f.l.triangularView<Eigen::Lower>();
  const Eigen::VectorXd z = lower.solve(r);
  LikelihoodTerms t;
  t.log_likelihood = -0.5 * z.squaredNorm() - f.half_logdet - 0.5 * static_cast<double>(r.size()) * kLog2Pi;
  if (dsigma) {
    const Eigen::MatrixXd half = lower.solve(*dsigma);
    const Eigen::MatrixXd w = lower.solve(half.transpose());
    t.score = -0.5 * w.trace() + 0.5 * z.dot(w * z);
    t.fisher_info = 0.5 * w.squaredNorm();
  }
  return t;
}

void check_observation(const StackedObservation& obs, const CovarianceModel& cov) {
  require(obs.N == cov.N, "observation length differs from covariance size");
  require(obs.n_r == static_cast<int>(cov.sigma.size()), "observation antenna count differs from covariance");
  require(obs.r.size() == 2 * static_cast<Eigen::Index>(obs.N) * obs.n_r, "stacked observation has wrong length");
}

LikelihoodTerms evaluate(const StackedObservation* obs, const CovarianceModel& cov, bool with_derivative) {
  if (obs) check_observation(*obs, cov);
  require(!with_derivative || cov.dsigma.size() == cov.sigma.size(), "covariance model lacks its derivative");
  LikelihoodTerms total;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2 * cov.N);
  for (std::size_t n = 0; n < cov.sigma.size(); ++n) {
    const Eigen::Ref<const Eigen::VectorXd> r = obs ? Eigen::Ref<const Eigen::VectorXd>(obs->antenna(static_cast<int>(n)))
                                                    : Eigen::Ref<const Eigen::VectorXd>(zero);
    const LikelihoodTerms t = evaluate_block(cov.sigma[n], with_derivative ? &cov.dsigma[n] : nullptr, r);
    total.log_likelihood += t.log_likelihood;
    total.score += t.score;
    total.fisher_info += t.fisher_info;
  }
  return total;
}

ModelParams at_frequency(ModelParams params, double f_D) {
  params.f_D = f_D;
  return params;
}

}  // namespace

StackedObservation StackedObservation::from(const ReceivedBlock& block) {
  StackedObservation obs;
  obs.n_r = block.n_r;
  obs.N = block.N;
  obs.r.resize(2 * static_cast<Eigen::Index>(block.N) * block.n_r);
  for (int n = 0; n < block.n_r; ++n) {
    const cplx* x = block.antenna(n);
    const Eigen::Index base = 2 * static_cast<Eigen::Index>(block.N) * n;
    for (int k = 0; k < block.N; ++k) {
      obs.r(base + k) = x[k].real();
      obs.r(base + block.N + k) = x[k].imag();
    }
  }
  return obs;
}

ModelParams ModelParams::from(const ScenarioConfig& config) {
  ModelParams p;
  p.n_t = config.n_t;
  p.n_r = config.n_r;
  p.L = config.L;
  p.T_s = config.T_s;
  p.f_D = config.f_D;
  p.noise_vars = config.noise_vars;
  p.delay_profile = config.delay_profile;
  p.symbol_powers = config.symbol_powers;
  return p;
}

void ModelParams::validate() const {
  require(n_t >= 1 && n_r >= 1 && L >= 1, "model: antenna and tap counts must be positive");
  require(T_s > 0.0 && f_D >= 0.0, "model: need T_s > 0 and f_D >= 0");
  require(noise_vars.size() == static_cast<std::size_t>(n_r), "model: one noise variance per receive antenna");
  require(delay_profile.size() == static_cast<std::size_t>(n_t) * n_r * L, "model: delay profile has wrong length");
  require(symbol_powers.size() == static_cast<std::size_t>(n_t), "model: one symbol power per transmit antenna");
  for (double v : noise_vars) require(v >= 0.0, "model: negative noise variance");
  for (double v : delay_profile) require(v >= 0.0, "model: negative tap variance");
  for (double v : symbol_powers) require(v >= 0.0, "model: negative symbol power");
}

CovarianceModel build_cov_da(const SymbolBlock& pilots, const ModelParams& params, int N, bool with_derivative) {
  params.validate();
  require(N >= 1, "build_cov_da: N must be >= 1");
  require(pilots.n_t == params.n_t && pilots.L == params.L && pilots.N == N, "build_cov_da: pilot block dimensions");
  return assemble(pilots, params, N, bessel_table(params.f_D, params.T_s, N, with_derivative));
}

double log_pdf_gaussian(const StackedObservation& obs, const CovarianceModel& cov) {
  return evaluate(&obs, cov, false).log_likelihood;
}

double fisher_info_da(const CovarianceModel& cov) { return evaluate(nullptr, cov, true).fisher_info; }

double crlb_da(const CovarianceModel& cov) {
  const double info = fisher_info_da(cov);
  if (!(info > 0.0)) fail(ErrorCode::UnboundedVariance, "Fisher information of f_D is zero");
  return 1.0 / info;
}

double score_da(const StackedObservation& obs, const CovarianceModel& cov) { return evaluate(&obs, cov, true).score; }

LikelihoodTerms evaluate_da(const StackedObservation& obs, const CovarianceModel& cov) {
  return evaluate(&obs, cov, true);
}

EstimateReport mle_da(const StackedObservation& obs, const SymbolBlock& pilots, const ModelParams& params,
                      const SearchSpec& search, int n_starts) {
  search.validate();
  require(n_starts >= 1, "mle_da: n_starts must be >= 1");
  std::vector<double> starts{0.5 * (search.f_l + search.f_h)};
  for (int i = 0; i + 1 < n_starts; ++i) {
    const double t = n_starts == 2 ? 0.0 : static_cast<double>(i) / (n_starts - 2);
    starts.push_back(search.f_l + t * (search.f_h - search.f_l));
  }

  struct Outcome {
    double f;
    double start;
    double log_likelihood;
    bool converged;
  };
  std::vector<Outcome> outcomes;
  EstimateReport report;
  report.method = EstimatorMethod::DaMle;
  for (double start : starts) {
    double f = start;
    LikelihoodTerms terms = evaluate_da(obs, build_cov_da(pilots, at_frequency(params, f), obs.N));
    report.ssr_curve.emplace_back(f, -terms.log_likelihood);
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      if (!(terms.fisher_info > 0.0) || !std::isfinite(terms.score)) break;
      const double next = std::clamp(f + terms.score / terms.fisher_info, search.f_l, search.f_h);
      ++report.diagnostics.iterations;
      const bool done = std::fabs(next - f) < search.delta_fine;
      f = next;
      terms = evaluate_da(obs, build_cov_da(pilots, at_frequency(params, f), obs.N));
      report.ssr_curve.emplace_back(f, -terms.log_likelihood);
      if (done) {
        converged = true;
        break;
      }
    }
    outcomes.push_back({f, start, terms.log_likelihood, converged});
  }

  const bool any_converged = std::any_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.converged; });
  const Outcome* best = nullptr;
  for (const Outcome& o : outcomes) {
    if (any_converged && !o.converged) continue;
    if (!best || o.log_likelihood > best->log_likelihood) best = &o;
  }
  report.f_hat = best->f;
  report.rough = best->start;
  report.diagnostics.starts = n_starts;
  report.diagnostics.converged = any_converged;
  report.diagnostics.log_likelihood = best->log_likelihood;
  if (!any_converged) report.diagnostics.note = "nonconvergence: no start met the tolerance within 50 iterations";
  return report;
}

EstimateReport mle_da_grid(const StackedObservation& obs, const SymbolBlock& pilots, const ModelParams& params,
                           const SearchSpec& search) {
  EstimateReport report = two_stage_search(
      [&](double f) { return -log_pdf_gaussian(obs, build_cov_da(pilots, at_frequency(params, f), obs.N, false)); },
      search);
  report.method = EstimatorMethod::DaMle;
  report.diagnostics.log_likelihood = -std::find_if(report.ssr_curve.rbegin(), report.ssr_curve.rend(), [&](const auto& p) {
                                         return p.first == report.f_hat;
                                       })->second;
  return report;
}

NdaMixture::NdaMixture(const ConstellationSpec& constellation, const ModelParams& params, int N)
    : constellation_(constellation), params_(params), N_(N), terms_(0) {
  params_.validate();
  require(N >= 1, "mixture: N must be >= 1");
  require(!constellation.is_continuous(), "mixture: needs a finite constellation");
  const double length = static_cast<double>(N + params.L - 1) * params.n_t;
  const double count = std::pow(static_cast<double>(constellation.size()), length);
  if (!(count <= kEnumerationCap)) {
    std::ostringstream msg;
    msg << "|M|^(N' n_t) = " << constellation.size() << "^" << length << " = " << count << " exceeds 2^20";
    fail(ErrorCode::IntractableEnumeration, msg.str());
  }
  terms_ = static_cast<std::size_t>(std::llround(count));
}

SymbolBlock NdaMixture::term_symbols(std::size_t index) const {
  SymbolBlock block;
  block.n_t = params_.n_t;
  block.L = params_.L;
  block.N = N_;
  const std::size_t length = static_cast<std::size_t>(block.span()) * block.n_t;
  block.symbols.resize(length);
  const std::size_t radix = constellation_.size();
  for (std::size_t p = 0; p < length; ++p) {
    const int m = static_cast<int>(p / static_cast<std::size_t>(block.span()));
    block.symbols[p] = std::sqrt(params_.symbol_powers[m]) * constellation_.points[index % radix];
    index /= radix;
  }
  return block;
}

std::vector<double> NdaMixture::loglik(std::span<const StackedObservation> obs, double f_D) const {
  const std::size_t count = obs.size();
  for (const StackedObservation& o : obs) {
    require(o.N == N_ && o.n_r == params_.n_r, "mixture: observation dimensions differ from the model");
  }
  const int dim = 2 * N_;
  std::vector<Eigen::MatrixXd> stacked(static_cast<std::size_t>(params_.n_r), Eigen::MatrixXd(dim, count));
  for (int n = 0; n < params_.n_r; ++n)
    for (std::size_t j = 0; j < count; ++j) stacked[n].col(static_cast<Eigen::Index>(j)) = obs[j].antenna(n);

  const BesselTable table = bessel_table(f_D, params_.T_s, N_, false);
  const ModelParams params = at_frequency(params_, f_D);
  std::vector<double> peak(count, -std::numeric_limits<double>::infinity());
  std::vector<double> sum(count, 0.0);
  Eigen::VectorXd term(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < terms_; ++i) {
    const CovarianceModel cov = assemble(term_symbols(i), params, N_, table);
    term.setZero();
    for (int n = 0; n < params_.n_r; ++n) {
      const BlockFactor f = factor(cov.sigma[n]);
      const Eigen::MatrixXd z = f.l.triangularView<Eigen::Lower>().solve(stacked[n]);
      term.array() -= 0.5 * z.colwise().squaredNorm().transpose().array() + f.half_logdet + 0.5 * dim * kLog2Pi;
    }
    for (std::size_t j = 0; j < count; ++j) {
      const double v = term(static_cast<Eigen::Index>(j));
      if (v > peak[j]) {
        sum[j] = sum[j] * std::exp(peak[j] - v) + 1.0;
        peak[j] = v;
      } else {
        sum[j] += std::exp(v - peak[j]);
      }
    }
  }
  std::vector<double> out(count);
  const double log_terms = std::log(static_cast<double>(terms_));
  for (std::size_t j = 0; j < count; ++j) out[j] = peak[j] + std::log(sum[j]) - log_terms;
  return out;
}

double nda_loglik(const StackedObservation& obs, const ConstellationSpec& constellation, const ModelParams& params,
                  double f_D) {
  const NdaMixture mixture(constellation, params, obs.N);
  return mixture.loglik(std::span<const StackedObservation>(&obs, 1), f_D).front();
}

EstimateReport mle_nda(const StackedObservation& obs, const ConstellationSpec& constellation, const ModelParams& params,
                       const SearchSpec& search) {
  return mle_nda_batch(std::span<const StackedObservation>(&obs, 1), constellation, params, search).front();
}

std::vector<EstimateReport> mle_nda_batch(std::span<const StackedObservation> obs, const ConstellationSpec& constellation,
                                          const ModelParams& params, const SearchSpec& search) {
  search.validate();
  require(!obs.empty(), "mle_nda: no observations");
  const NdaMixture mixture(constellation, params, obs.front().N);
  std::map<double, std::vector<double>> cache;
  const auto values_at = [&](double f) -> const std::vector<double>& {
    auto it = cache.find(f);
    if (it == cache.end()) it = cache.emplace(f, mixture.loglik(obs, f)).first;
    return it->second;
  };

  for (double f : grid_points(search.f_l, search.f_h, search.delta_rough)) values_at(f);
  std::vector<double> rough(obs.size());
  for (std::size_t j = 0; j < obs.size(); ++j)
    rough[j] = grid_search([&](double f) { return -values_at(f)[j]; }, search.f_l, search.f_h, search.delta_rough);
  std::vector<double> fine;
  for (double r : rough) {
    const double lo = std::max(search.f_l, r - search.delta_rough);
    const double hi = std::min(search.f_h, r + search.delta_rough);
    for (double f : grid_points(lo, hi, search.delta_fine)) fine.push_back(f);
  }
  std::sort(fine.begin(), fine.end());
  fine.erase(std::unique(fine.begin(), fine.end()), fine.end());
  for (double f : fine) values_at(f);

  std::vector<EstimateReport> reports;
  reports.reserve(obs.size());
  for (std::size_t j = 0; j < obs.size(); ++j) {
    EstimateReport report = two_stage_search([&](double f) { return -values_at(f)[j]; }, search);
    report.method = EstimatorMethod::NdaMle;
    report.diagnostics.log_likelihood = values_at(report.f_hat)[j];
    reports.push_back(std::move(report));
  }
  return reports;
}

BoundReport crlb_nda_mc(const ScenarioConfig& scenario, int n_mc, Rng& rng, double h_rel) {
  scenario.validate();
  require(n_mc >= 2, "crlb_nda_mc: n_mc must be >= 2");
  require(scenario.f_D > 0.0, "crlb_nda_mc: f_D must be positive");
  require(h_rel > 0.0 && h_rel < 1.0, "crlb_nda_mc: h_rel must lie in (0, 1)");
  const ModelParams params = ModelParams::from(scenario);
  const NdaMixture mixture(scenario.constellation, params, scenario.N);

  const Rng base(rng.engine()());
  std::vector<StackedObservation> obs;
  obs.reserve(static_cast<std::size_t>(n_mc));
  for (int j = 0; j < n_mc; ++j)
    obs.push_back(StackedObservation::from(simulate(scenario, base.split({static_cast<std::uint64_t>(j)})).received));

  const double h = h_rel * scenario.f_D;
  const std::vector<double> lo = mixture.loglik(obs, scenario.f_D - h);
  const std::vector<double> mid = mixture.loglik(obs, scenario.f_D);
  const std::vector<double> hi = mixture.loglik(obs, scenario.f_D + h);
  double mean = 0.0;
  double sq = 0.0;
  for (int j = 0; j < n_mc; ++j) {
    const double v = -(hi[j] - 2.0 * mid[j] + lo[j]) / (h * h);
    const double delta = v - mean;
    mean += delta / (j + 1);
    sq += delta * (v - mean);
  }
  BoundReport report;
  report.f_D = scenario.f_D;
  report.mode = BoundMode::Nda;
  report.mc_samples = n_mc;
  report.fisher_info = mean;
  report.mc_stderr = std::sqrt(sq / (n_mc - 1) / n_mc);
  if (mean > 0.0) report.crlb = 1.0 / mean;
  return report;
}

BoundReport crlb_da_scenario(const ScenarioConfig& scenario, Rng& rng) {
  scenario.validate();
  const Rng base(rng.engine()());
  const SymbolBlock pilots = generate_symbols(scenario, base);
  BoundReport report;
  report.f_D = scenario.f_D;
  report.mode = BoundMode::Da;
  report.fisher_info = fisher_info_da(build_cov_da(pilots, ModelParams::from(scenario), scenario.N));
  if (report.fisher_info > 0.0) report.crlb = 1.0 / report.fisher_info;
  return report;
}

}  // namespace doppler
