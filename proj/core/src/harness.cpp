// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "doppler/error.hpp"
#include "doppler/likelihood.hpp"
#include "doppler/rng.hpp"

namespace doppler {

namespace {

constexpr std::array<std::string_view, 8> kTags{"mbe_miso",      "mbe_equal", "mbe_optimal", "mbe_semiblind",
                                                "mle_da",        "mle_nda",   "crlb_da",     "crlb_nda"};

bool is_bound(std::string_view tag) { return tag == "crlb_da" || tag == "crlb_nda"; }

// Offset keeping bound-only streams apart from trial streams.
constexpr std::uint64_t kBoundStream = 0x626f756e64ULL;

std::string status_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code()));
  return "error";
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (std::thread& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double snr_to_noise_var(double gamma_db, int n_r) {
  require(n_r >= 1, "snr_to_noise_var: n_r must be >= 1");
  return std::pow(10.0, -gamma_db / 10.0) / n_r;
}

double doppler_from_velocity(double v, double f_c) {
  require(v >= 0.0, "doppler_from_velocity: v must be >= 0");
  return f_c * v / kSpeedOfLight;
}

ScenarioConfig make_scenario(const ScenarioSpec& spec) {
  ScenarioConfig c;
  c.n_t = spec.n_t;
  c.n_r = spec.n_r;
  c.L = spec.L;
  c.f_D = spec.f_D;
  c.T_s = spec.T_s;
  c.N = spec.N;
  c.seed = spec.seed;
  c.constellation = make_constellation(spec.constellation);
  require(spec.n_t >= 1 && spec.n_r >= 1 && spec.L >= 1, "scenario: antenna and tap counts must be >= 1");
  c.symbol_powers = spec.symbol_powers.empty()
                        ? std::vector<double>(static_cast<std::size_t>(spec.n_t), 1.0 / (spec.n_t * spec.n_r))
                        : spec.symbol_powers;
  c.noise_vars = spec.noise_vars.empty()
                     ? std::vector<double>(static_cast<std::size_t>(spec.n_r), snr_to_noise_var(spec.snr_db, spec.n_r))
                     : spec.noise_vars;
  if (spec.delay_profile.empty()) {
    const std::vector<double> link = exponential_delay_profile(spec.L, spec.l_rms > 0.0 ? spec.l_rms : spec.L / 4.0);
    for (int i = 0; i < spec.n_t * spec.n_r; ++i) c.delay_profile.insert(c.delay_profile.end(), link.begin(), link.end());
  } else {
    c.delay_profile = spec.delay_profile;
  }
  c.validate();
  return c;
}

double nrmse(std::span<const TrialResult> results, double T_s) {
  require(T_s > 0.0, "nrmse: T_s must be positive");
  require(!results.empty(), "nrmse: no results");
  const double f = results.front().f_true;
  if (f == 0.0) fail(ErrorCode::UndefinedNormalization, "nrmse: f_true is zero");
  double sum = 0.0;
  int count = 0;
  for (const TrialResult& r : results) {
    require(r.f_true == f, "nrmse: trials disagree on f_true");
    if (!r.ok()) continue;
    const double e = r.f_hat * T_s - f * T_s;
    sum += e * e;
    ++count;
  }
  require(count > 0, "nrmse: no successful trials");
  return std::sqrt(sum / count) / (f * T_s);
}

std::string_view to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::DopplerRate: return "doppler_rate";
    case SweepAxis::SnrDb: return "snr_db";
    case SweepAxis::NTx: return "n_t";
    case SweepAxis::NRx: return "n_r";
    case SweepAxis::N: return "N";
    case SweepAxis::UMin: return "u_min";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::DopplerRate, SweepAxis::SnrDb, SweepAxis::NTx, SweepAxis::NRx, SweepAxis::N,
                      SweepAxis::UMin})
    if (to_string(a) == name) return a;
  if (name == "f_D*T_s" || name == "fdts") return SweepAxis::DopplerRate;
  fail(ErrorCode::InvalidArgument, "unknown sweep axis '" + std::string(name) + "'");
}

std::span<const std::string_view> estimator_tags() noexcept { return kTags; }

void SweepSpec::validate() const {
  require(trials >= 1, "sweep: trials must be >= 1");
  require(!values.empty(), "sweep: values must not be empty");
  require(!estimators.empty(), "sweep: no estimators");
  for (const std::string& e : estimators)
    require(std::find(kTags.begin(), kTags.end(), e) != kTags.end(), "sweep: unknown estimator '" + e + "'");
  search.validate();
  require(n_b >= 2 && n_starts >= 1 && n_mc >= 2, "sweep: need n_b >= 2, n_starts >= 1, n_mc >= 2");
}

ScenarioSpec sweep_point(const SweepSpec& spec, std::size_t axis_index) {
  ScenarioSpec p = spec.base;
  const double v = spec.values.at(axis_index);
  const auto as_count = [&](const char* what) {
    require(v >= 1.0 && v == std::floor(v), std::string("sweep: ") + what + " values must be positive integers");
    return static_cast<int>(v);
  };
  switch (spec.axis) {
    case SweepAxis::DopplerRate: p.f_D = v / p.T_s; break;
    case SweepAxis::SnrDb: p.snr_db = v; break;
    case SweepAxis::NTx: p.n_t = as_count("n_t"); break;
    case SweepAxis::NRx: p.n_r = as_count("n_r"); break;
    case SweepAxis::N: p.N = as_count("N"); break;
    case SweepAxis::UMin: as_count("u_min"); break;
  }
  return p;
}

LagGrid sweep_grid(const SweepSpec& spec, const ScenarioSpec& point) {
  LagGrid grid = spec.grid.u_max == 0 ? LagGrid::standard(point.L, point.N) : spec.grid;
  if (spec.grid.u_max == 0 && spec.grid.u_min > 0) grid.u_min = spec.grid.u_min;
  if (spec.grid.u_max == 0 && spec.grid.u_s > 0) grid.u_s = spec.grid.u_s;
  return grid;
}

LagGrid sweep_grid(const SweepSpec& spec, std::size_t axis_index) {
  LagGrid grid = sweep_grid(spec, sweep_point(spec, axis_index));
  if (spec.axis == SweepAxis::UMin) grid.u_min = static_cast<int>(spec.values.at(axis_index));
  return grid;
}

namespace {

struct PointSetup {
  double axis_value;
  ScenarioSpec spec;
  ScenarioConfig base;  ///< seed is replaced per trial
  LagGrid grid;
};

PointSetup setup_point(const SweepSpec& spec, std::size_t a) {
  PointSetup p;
  p.axis_value = spec.values[a];
  p.spec = sweep_point(spec, a);
  p.base = make_scenario(p.spec);
  p.grid = sweep_grid(spec, a);
  return p;
}

Rng trial_rng(const SweepSpec& spec, std::size_t a, int t) {
  return Rng(derive_seed(spec.master_seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(t)}));
}

ScenarioConfig trial_config(const PointSetup& p, const Rng& rng) {
  ScenarioConfig c = p.base;
  c.seed = rng.seed();
  return c;
}

double run_estimator(std::string_view tag, const SweepSpec& spec, const PointSetup& p, const ScenarioConfig& config,
                     const Simulation& sim, const Rng& rng) {
  const ReceivedBlock& block = sim.received;
  if (tag == "mbe_miso") {
    return estimate_miso(std::span<const cplx>(block.antenna(0), static_cast<std::size_t>(block.N)), config, p.grid,
                         spec.search)
        .f_hat;
  }
  if (tag == "mbe_equal" || tag == "mbe_optimal") {
    MimoOptions options;
    options.combining = tag == "mbe_equal" ? Combining::Equal : Combining::Optimal;
    options.n_b = spec.n_b;
    options.diagonal_covariance = spec.diagonal_covariance;
    Rng boot = rng.split({4});
    return estimate_mimo(block, config, p.grid, spec.search, options, boot).f_hat;
  }
  if (tag == "mbe_semiblind") {
    return estimate_semiblind(block, config.noise_vars, config.T_s, p.grid, spec.search).f_hat;
  }
  if (tag == "mle_da") {
    return mle_da(StackedObservation::from(block), sim.symbols, ModelParams::from(config), spec.search, spec.n_starts)
        .f_hat;
  }
  fail(ErrorCode::InvalidArgument, "estimator '" + std::string(tag) + "' is not a per-trial estimator");
}

SummaryRow summarize(const PointSetup& p, const std::string& tag, std::span<const TrialResult> rows) {
  SummaryRow s;
  s.axis_value = p.axis_value;
  s.estimator = tag;
  s.trials = static_cast<int>(rows.size());
  double ratio = 0.0;
  int ok = 0;
  for (const TrialResult& r : rows) {
    if (!r.ok()) {
      ++s.failures;
      continue;
    }
    ratio += r.f_hat / r.f_true;
    ++ok;
  }
  if (ok > 0) {
    s.nrmse = nrmse(rows, p.base.T_s);
    s.mean_ratio = ratio / ok;
  } else {
    s.nrmse = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  std::vector<PointSetup> points;
  for (std::size_t a = 0; a < spec.values.size(); ++a) points.push_back(setup_point(spec, a));

  std::vector<std::string> per_trial;
  bool want_nda = false;
  bool want_crlb_da = false;
  bool want_crlb_nda = false;
  for (const std::string& e : spec.estimators) {
    if (e == "mle_nda") want_nda = true;
    else if (e == "crlb_da") want_crlb_da = true;
    else if (e == "crlb_nda") want_crlb_nda = true;
    else per_trial.push_back(e);
  }
  std::vector<std::string> trial_tags = per_trial;
  if (want_nda) trial_tags.push_back("mle_nda");

  const std::size_t n_points = points.size();
  const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
  const std::size_t n_tags = trial_tags.size();
  // results[(a * n_tags + e) * n_trials + t]
  std::vector<TrialResult> results(n_points * n_tags * n_trials);
  std::vector<double> da_info(want_crlb_da ? n_points * n_trials : 0, 0.0);
  std::vector<std::string> da_status(da_info.size(), "ok");
  const auto slot = [&](std::size_t a, std::size_t e, std::size_t t) -> TrialResult& {
    return results[(a * n_tags + e) * n_trials + t];
  };
  for (std::size_t a = 0; a < n_points; ++a)
    for (std::size_t e = 0; e < n_tags; ++e)
      for (std::size_t t = 0; t < n_trials; ++t) {
        TrialResult& r = slot(a, e, t);
        r.axis_value = points[a].axis_value;
        r.estimator = trial_tags[e];
        r.trial = static_cast<int>(t);
        r.f_true = points[a].base.f_D;
      }

  std::vector<std::vector<StackedObservation>> nda_obs(want_nda ? n_points : 0);
  for (auto& v : nda_obs) v.resize(n_trials);

  parallel_for(n_points * n_trials, threads, [&](std::size_t task) {
    const std::size_t a = task / n_trials;
    const std::size_t t = task % n_trials;
    const PointSetup& p = points[a];
    const Rng rng = trial_rng(spec, a, static_cast<int>(t));
    const ScenarioConfig config = trial_config(p, rng);
    Simulation sim;
    try {
      sim = simulate(config, rng.split({0}));
    } catch (const std::exception& e) {
      for (std::size_t k = 0; k < n_tags; ++k) slot(a, k, t).status = status_of(e);
      if (want_crlb_da) da_status[a * n_trials + t] = status_of(e);
      return;
    }
    for (std::size_t e = 0; e < per_trial.size(); ++e) {
      TrialResult& r = slot(a, e, t);
      const auto start = std::chrono::steady_clock::now();
      try {
        r.f_hat = run_estimator(per_trial[e], spec, p, config, sim, rng);
      } catch (const std::exception& ex) {
        r.status = status_of(ex);
      }
      r.wall_time = seconds_since(start);
    }
    if (want_nda) nda_obs[a][t] = StackedObservation::from(sim.received);
    if (want_crlb_da) {
      try {
        da_info[a * n_trials + t] = fisher_info_da(build_cov_da(sim.symbols, ModelParams::from(config), config.N));
      } catch (const std::exception& ex) {
        da_status[a * n_trials + t] = status_of(ex);
      }
    }
  });

  if (want_nda) {
    parallel_for(n_points, threads, [&](std::size_t a) {
      const std::size_t e = n_tags - 1;
      const auto start = std::chrono::steady_clock::now();
      try {
        const std::vector<EstimateReport> reports = mle_nda_batch(
            nda_obs[a], points[a].base.constellation, ModelParams::from(points[a].base), spec.search);
        const double wall = seconds_since(start) / static_cast<double>(n_trials);
        for (std::size_t t = 0; t < n_trials; ++t) {
          slot(a, e, t).f_hat = reports[t].f_hat;
          slot(a, e, t).wall_time = wall;
        }
      } catch (const std::exception& ex) {
        for (std::size_t t = 0; t < n_trials; ++t) slot(a, e, t).status = status_of(ex);
      }
    });
  }

  std::vector<BoundReport> nda_bounds(want_crlb_nda ? n_points : 0);
  std::vector<std::string> nda_bound_status(nda_bounds.size(), "ok");
  if (want_crlb_nda) {
    parallel_for(n_points, threads, [&](std::size_t a) {
      try {
        Rng rng(derive_seed(spec.master_seed, {kBoundStream, static_cast<std::uint64_t>(a)}));
        ScenarioConfig config = points[a].base;
        config.seed = rng.seed();
        nda_bounds[a] = crlb_nda_mc(config, spec.n_mc, rng, spec.h_rel);
      } catch (const std::exception& ex) {
        nda_bound_status[a] = status_of(ex);
      }
    });
  }

  SweepResult out;
  out.trials = results;
  for (std::size_t a = 0; a < n_points; ++a) {
    const PointSetup& p = points[a];
    for (const std::string& tag : spec.estimators) {
      if (!is_bound(tag)) {
        const std::size_t e = static_cast<std::size_t>(std::find(trial_tags.begin(), trial_tags.end(), tag) - trial_tags.begin());
        out.summary.push_back(summarize(p, tag, std::span<const TrialResult>(&slot(a, e, 0), n_trials)));
        continue;
      }
      SummaryRow s;
      s.axis_value = p.axis_value;
      s.estimator = tag;
      s.nrmse = std::numeric_limits<double>::quiet_NaN();
      if (tag == "crlb_da") {
        s.trials = spec.trials;
        double sum = 0.0;
        int ok = 0;
        for (std::size_t t = 0; t < n_trials; ++t) {
          const double info = da_info[a * n_trials + t];
          if (da_status[a * n_trials + t] != "ok" || !(info > 0.0)) {
            ++s.failures;
            continue;
          }
          sum += 1.0 / info;
          ++ok;
        }
        if (ok > 0) s.crlb = sum / ok;
      } else {
        s.trials = spec.n_mc;
        if (nda_bound_status[a] != "ok") {
          s.failures = spec.n_mc;
        } else {
          s.crlb = nda_bounds[a].crlb;
          const double info = nda_bounds[a].fisher_info;
          s.crlb_stderr = info > 0.0 ? nda_bounds[a].mc_stderr / (info * info) : 0.0;
        }
      }
      if (s.crlb && p.base.f_D > 0.0) s.nrmse = std::sqrt(*s.crlb) / p.base.f_D;
      out.summary.push_back(s);
    }
  }
  return out;
}

}  // namespace doppler
