// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

// doppler: simulate, estimate, sweep, bounds and psi subcommands.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "doppler/doppler.hpp"

namespace fs = std::filesystem;
using namespace doppler;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = 1;
  std::string estimator = "mbe_equal";
  std::string input;
};

SweepSpec load(const Common& c) {
  SweepSpec spec = c.config.empty() ? SweepSpec{} : load_run_config(c.config);
  if (c.seed) {
    spec.base.seed = *c.seed;
    spec.master_seed = *c.seed;
  }
  return spec;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / name;
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path.string());
  return out;
}

ReceivedBlock obtain_block(const Common& c, const ScenarioConfig& config, Simulation* sim) {
  if (!c.input.empty()) {
    std::ifstream in(c.input);
    require(static_cast<bool>(in), "cannot open input '" + c.input + "'");
    ReceivedBlock block = read_received_csv(in);
    require(block.n_r == config.n_r, "input has a different antenna count than the config");
    return block;
  }
  *sim = simulate(config, Rng(config.seed));
  return sim->received;
}

int cmd_simulate(const Common& c) {
  const SweepSpec spec = load(c);
  const ScenarioConfig config = make_scenario(spec.base);
  const Simulation sim = simulate(config, Rng(config.seed));
  std::ofstream csv = open_out(c, "received.csv");
  write_received_csv(csv, sim.received);
  open_out(c, "scenario.json") << to_json(config) << '\n';
  std::cout << "wrote " << (fs::path(c.out) / "received.csv").string() << " (" << config.n_r << " x " << config.N << ")\n";
  return 0;
}

int cmd_estimate(const Common& c) {
  const SweepSpec spec = load(c);
  ScenarioConfig config = make_scenario(spec.base);
  Simulation sim;
  const ReceivedBlock block = obtain_block(c, config, &sim);
  config.N = block.N;
  const LagGrid grid = sweep_grid(spec, spec.base);
  EstimateReport report;
  const std::string& e = c.estimator;
  if (e == "mbe_miso") {
    report = estimate_miso(std::span<const cplx>(block.antenna(0), static_cast<std::size_t>(block.N)), config, grid,
                           spec.search);
  } else if (e == "mbe_equal" || e == "mbe_optimal") {
    MimoOptions options;
    options.combining = e == "mbe_equal" ? Combining::Equal : Combining::Optimal;
    options.n_b = spec.n_b;
    options.diagonal_covariance = spec.diagonal_covariance;
    Rng boot = Rng(config.seed).split({4});
    report = estimate_mimo(block, config, grid, spec.search, options, boot);
  } else if (e == "mbe_semiblind") {
    report = estimate_semiblind(block, config.noise_vars, config.T_s, grid, spec.search);
  } else if (e == "mle_da") {
    require(c.input.empty(), "mle_da needs the pilots, so it only runs on simulated data");
    report = mle_da(StackedObservation::from(block), sim.symbols, ModelParams::from(config), spec.search, spec.n_starts);
  } else if (e == "mle_nda") {
    report = mle_nda(StackedObservation::from(block), config.constellation, ModelParams::from(config), spec.search);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown estimator '" + e + "'");
  }
  const std::string json = to_json(report);
  if (c.out != ".") open_out(c, "report.json") << json << '\n';
  std::cout << json << '\n';
  return 0;
}

int cmd_sweep(const Common& c) {
  const SweepSpec spec = load(c);
  const SweepResult result = run_sweep(spec, c.threads);
  std::ofstream trials = open_out(c, "trials.csv");
  write_trials_csv(trials, result.trials);
  std::ofstream summary = open_out(c, "summary.csv");
  write_summary_csv(summary, result.summary);
  open_out(c, "manifest.json") << run_manifest(spec, c.threads) << '\n';
  write_summary_csv(std::cout, result.summary);
  return 0;
}

int cmd_bounds(const Common& c) {
  SweepSpec spec = load(c);
  bool da = false;
  bool nda = false;
  for (const std::string& e : spec.estimators) {
    da = da || e == "crlb_da";
    nda = nda || e == "crlb_nda";
  }
  if (!da && !nda) da = true;
  std::ofstream csv = open_out(c, "bounds.csv");
  csv << "axis,mode,f_d_hz,fisher_info,crlb_hz2,mc_stderr,mc_samples\n";
  for (std::size_t a = 0; a < spec.values.size(); ++a) {
    const ScenarioConfig config = make_scenario(sweep_point(spec, a));
    for (const bool is_da : {true, false}) {
      if ((is_da && !da) || (!is_da && !nda)) continue;
      Rng rng(derive_seed(spec.master_seed, {static_cast<std::uint64_t>(a)}));
      const BoundReport b = is_da ? crlb_da_scenario(config, rng) : crlb_nda_mc(config, spec.n_mc, rng, spec.h_rel);
      const std::string row = format_number(spec.values[a]) + ',' + (is_da ? "da" : "nda") + ',' + format_number(b.f_D) +
                              ',' + format_number(b.fisher_info) + ',' + (b.crlb ? format_number(*b.crlb) : "") + ',' +
                              format_number(b.mc_stderr) + ',' + std::to_string(b.mc_samples);
      csv << row << '\n';
      std::cout << row << '\n';
    }
  }
  return 0;
}

int cmd_psi(const Common& c) {
  const SweepSpec spec = load(c);
  ScenarioConfig config = make_scenario(spec.base);
  Simulation sim;
  const ReceivedBlock block = obtain_block(c, config, &sim);
  const LagGrid grid = sweep_grid(spec, spec.base);
  std::vector<AfEstimate> per_antenna;
  for (int n = 0; n < block.n_r; ++n) {
    const std::span<const cplx> samples(block.antenna(n), static_cast<std::size_t>(block.N));
    per_antenna.push_back(est_psi_blind(estimate_moments(samples, grid), config.constellation.omega_s, n));
  }
  const AfEstimate combined = combine_equal(per_antenna);
  const EstimateReport fit = fit_af(combined, config.T_s, spec.search);
  std::ofstream csv = open_out(c, "psi.csv");
  write_af_csv(csv, combined, fit.f_hat, config.T_s);
  std::cout << "f_hat = " << format_number(fit.f_hat) << " Hz over " << combined.size() << " lags\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum Doppler spread estimation in MIMO frequency-selective Rayleigh fading"};
  app.require_subcommand(1);
  Common c;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "JSON run document");
    sub->add_option("--seed", c.seed, "seed overriding the config");
    sub->add_option("--out", c.out, "output directory");
  };
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "dump one received block as CSV");
  add_common(simulate_cmd);
  CLI::App* estimate_cmd = app.add_subcommand("estimate", "estimate f_D from one block, JSON report on stdout");
  add_common(estimate_cmd);
  estimate_cmd->add_option("--estimator", c.estimator, "mbe_miso|mbe_equal|mbe_optimal|mbe_semiblind|mle_da|mle_nda");
  estimate_cmd->add_option("--input", c.input, "received CSV from 'simulate' instead of a fresh simulation");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep to trials.csv, summary.csv, manifest.json");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  CLI::App* bounds_cmd = app.add_subcommand("bounds", "CRLB curves over the sweep axis to bounds.csv");
  add_common(bounds_cmd);
  CLI::App* psi_cmd = app.add_subcommand("psi", "dump the estimated AF and its fitted model to psi.csv");
  add_common(psi_cmd);
  psi_cmd->add_option("--input", c.input, "received CSV from 'simulate'");

  CLI11_PARSE(app, argc, argv);
  try {
    if (simulate_cmd->parsed()) return cmd_simulate(c);
    if (estimate_cmd->parsed()) return cmd_estimate(c);
    if (sweep_cmd->parsed()) return cmd_sweep(c);
    if (bounds_cmd->parsed()) return cmd_bounds(c);
    if (psi_cmd->parsed()) return cmd_psi(c);
  } catch (const Error& e) {
    std::cerr << "doppler: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "doppler: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
