// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include "doppler/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

#include "doppler/error.hpp"

namespace doppler {

using nlohmann::json;

namespace {

const std::set<std::string> kScenarioKeys{"n_t",        "n_r",           "L",         "f_D",          "T_s",
                                          "N",          "constellation", "snr_db",    "l_rms",        "symbol_powers",
                                          "noise_vars", "delay_profile", "seed"};
const std::set<std::string> kRunKeys{"axis", "values", "trials", "base",   "estimators",          "master_seed", "grid",
                                     "search", "n_b",  "n_starts", "n_mc", "diagonal_covariance", "h_rel"};

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("config field '") + key + "': " + e.what());
  }
}

ScenarioSpec scenario_from(const json& j) {
  ScenarioSpec s;
  read(j, "n_t", s.n_t);
  read(j, "n_r", s.n_r);
  read(j, "L", s.L);
  read(j, "f_D", s.f_D);
  read(j, "T_s", s.T_s);
  read(j, "N", s.N);
  read(j, "constellation", s.constellation);
  read(j, "snr_db", s.snr_db);
  read(j, "l_rms", s.l_rms);
  read(j, "symbol_powers", s.symbol_powers);
  read(j, "noise_vars", s.noise_vars);
  read(j, "delay_profile", s.delay_profile);
  read(j, "seed", s.seed);
  return s;
}

void reject_unknown(const json& j, const std::set<std::string>& a, const std::set<std::string>& b, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!a.count(it.key()) && !b.count(it.key()))
      fail(ErrorCode::InvalidArgument, std::string("unknown key '") + it.key() + "' in " + where);
}

json scenario_json(const ScenarioSpec& s) {
  json j{{"n_t", s.n_t}, {"n_r", s.n_r}, {"L", s.L},
         {"f_D", s.f_D}, {"T_s", s.T_s}, {"N", s.N},
         {"constellation", s.constellation}, {"snr_db", s.snr_db}, {"l_rms", s.l_rms},
         {"seed", s.seed}};
  if (!s.symbol_powers.empty()) j["symbol_powers"] = s.symbol_powers;
  if (!s.noise_vars.empty()) j["noise_vars"] = s.noise_vars;
  if (!s.delay_profile.empty()) j["delay_profile"] = s.delay_profile;
  return j;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

SweepSpec parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  SweepSpec spec;
  if (j.contains("base")) {
    reject_unknown(j, kRunKeys, {}, "run config");
    require(j.at("base").is_object(), "config field 'base' must be an object");
    reject_unknown(j.at("base"), kScenarioKeys, {}, "base");
    spec.base = scenario_from(j.at("base"));
  } else {
    reject_unknown(j, kRunKeys, kScenarioKeys, "run config");
    spec.base = scenario_from(j);
  }
  if (j.contains("axis")) spec.axis = parse_axis(j.at("axis").get<std::string>());
  read(j, "values", spec.values);
  if (spec.values.empty()) spec.values = {spec.axis == SweepAxis::DopplerRate ? spec.base.f_D * spec.base.T_s : 0.0};
  read(j, "trials", spec.trials);
  read(j, "estimators", spec.estimators);
  read(j, "master_seed", spec.master_seed);
  if (!j.contains("master_seed")) spec.master_seed = spec.base.seed;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"u_min", "u_max", "u_s"}, {}, "grid");
    read(g, "u_min", spec.grid.u_min);
    read(g, "u_max", spec.grid.u_max);
    read(g, "u_s", spec.grid.u_s);
  }
  if (j.contains("search")) {
    const json& s = j.at("search");
    reject_unknown(s, {"f_l", "f_h", "delta_rough", "delta_fine"}, {}, "search");
    read(s, "f_l", spec.search.f_l);
    read(s, "f_h", spec.search.f_h);
    read(s, "delta_rough", spec.search.delta_rough);
    read(s, "delta_fine", spec.search.delta_fine);
  }
  read(j, "n_b", spec.n_b);
  read(j, "diagonal_covariance", spec.diagonal_covariance);
  read(j, "n_starts", spec.n_starts);
  read(j, "n_mc", spec.n_mc);
  read(j, "h_rel", spec.h_rel);
  return spec;
}

SweepSpec load_run_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string to_json(const EstimateReport& report, int indent) {
  json curve = json::array();
  for (const auto& [f, v] : report.ssr_curve) curve.push_back({f, number_or_null(v)});
  const EstimateDiagnostics& d = report.diagnostics;
  json diagnostics{{"rough_points", d.rough_points}, {"fine_points", d.fine_points}, {"iterations", d.iterations},
                   {"starts", d.starts},           {"converged", d.converged}};
  if (report.method == EstimatorMethod::DaMle || report.method == EstimatorMethod::NdaMle)
    diagnostics["log_likelihood"] = number_or_null(d.log_likelihood);
  if (report.method == EstimatorMethod::MimoOptimal) {
    diagnostics["provisional_f"] = d.provisional_f;
    diagnostics["weights"] = d.weights;
  }
  if (!d.note.empty()) diagnostics["note"] = d.note;
  const json j{{"f_hat", report.f_hat},
               {"rough", report.rough},
               {"method", std::string(to_string(report.method))},
               {"ssr_curve", curve},
               {"diagnostics", diagnostics}};
  return j.dump(indent);
}

std::string to_json(const BoundReport& report, int indent) {
  json j{{"f_D", report.f_D},
         {"fisher_info", number_or_null(report.fisher_info)},
         {"crlb", report.crlb ? json(*report.crlb) : json(nullptr)},
         {"mode", report.mode == BoundMode::Da ? "da" : "nda"},
         {"mc_samples", report.mc_samples},
         {"mc_stderr", report.mc_stderr}};
  return j.dump(indent);
}

std::string to_json(const ScenarioConfig& c, int indent) {
  const json j{{"n_t", c.n_t},
               {"n_r", c.n_r},
               {"L", c.L},
               {"f_D", c.f_D},
               {"T_s", c.T_s},
               {"N", c.N},
               {"constellation", c.constellation.name},
               {"symbol_powers", c.symbol_powers},
               {"noise_vars", c.noise_vars},
               {"delay_profile", c.delay_profile},
               {"seed", c.seed}};
  return j.dump(indent);
}

std::string run_manifest(const SweepSpec& spec, int threads) {
  json grid{{"u_min", spec.grid.u_min}, {"u_max", spec.grid.u_max}, {"u_s", spec.grid.u_s}};
  json search{{"f_l", spec.search.f_l},
              {"f_h", spec.search.f_h},
              {"delta_rough", spec.search.delta_rough},
              {"delta_fine", spec.search.delta_fine}};
  json config{{"axis", std::string(to_string(spec.axis))},
              {"values", spec.values},
              {"trials", spec.trials},
              {"base", scenario_json(spec.base)},
              {"estimators", spec.estimators},
              {"master_seed", spec.master_seed},
              {"grid", grid},
              {"search", search},
              {"n_b", spec.n_b},
              {"diagonal_covariance", spec.diagonal_covariance},
              {"n_starts", spec.n_starts},
              {"n_mc", spec.n_mc},
              {"h_rel", spec.h_rel}};
  json versions{{"dopplerspread", std::string(library_version())},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"compiler", __VERSION__}};
  const json j{{"config", config}, {"master_seed", spec.master_seed}, {"threads", threads}, {"versions", versions}};
  return j.dump(2);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

void write_trials_csv(std::ostream& out, std::span<const TrialResult> trials) {
  out << "axis,estimator,trial,f_true_hz,f_hat_hz,wall_s,status\n";
  for (const TrialResult& t : trials) {
    out << format_number(t.axis_value) << ',' << t.estimator << ',' << t.trial << ',' << format_number(t.f_true) << ','
        << (t.ok() ? format_number(t.f_hat) : std::string()) << ',' << format_number(t.wall_time) << ',' << t.status
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "axis,estimator,trials,failures,nrmse,mean_ratio,crlb_hz2\n";
  for (const SummaryRow& r : rows) {
    out << format_number(r.axis_value) << ',' << r.estimator << ',' << r.trials << ',' << r.failures << ','
        << format_number(r.nrmse) << ',' << (r.mean_ratio ? format_number(*r.mean_ratio) : std::string()) << ','
        << (r.crlb ? format_number(*r.crlb) : std::string()) << '\n';
  }
}

void write_received_csv(std::ostream& out, const ReceivedBlock& block) {
  out << "n,k,re,im\n";
  for (int n = 0; n < block.n_r; ++n)
    for (int k = 0; k < block.N; ++k) {
      const cplx r = block.antenna(n)[k];
      out << n << ',' << k + 1 << ',' << format_number(r.real()) << ',' << format_number(r.imag()) << '\n';
    }
}

ReceivedBlock read_received_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "received CSV is empty");
  require(line.rfind("n,k,re,im", 0) == 0, "received CSV must start with the header n,k,re,im");
  std::vector<std::vector<cplx>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    int n = 0;
    int k = 0;
    double re = 0.0;
    double im = 0.0;
    require(std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &n, &k, &re, &im) == 4,
            "received CSV: malformed line " + std::to_string(line_no));
    require(n >= 0 && k >= 1, "received CSV: bad index on line " + std::to_string(line_no));
    if (rows.size() <= static_cast<std::size_t>(n)) rows.resize(static_cast<std::size_t>(n) + 1);
    require(static_cast<std::size_t>(k) == rows[n].size() + 1,
            "received CSV: samples of antenna " + std::to_string(n) + " out of order");
    rows[n].emplace_back(re, im);
  }
  require(!rows.empty(), "received CSV holds no samples");
  ReceivedBlock block;
  block.n_r = static_cast<int>(rows.size());
  block.N = static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    require(static_cast<int>(row.size()) == block.N, "received CSV: antennas differ in length");
    block.samples.insert(block.samples.end(), row.begin(), row.end());
  }
  return block;
}

void write_af_csv(std::ostream& out, const AfEstimate& af, double f_hat, double T_s) {
  out << "u,psi_hat,psi_model\n";
  for (std::size_t i = 0; i < af.lags.size(); ++i)
    out << af.lags[i] << ',' << format_number(af.values[i]) << ',' << format_number(theoretical_psi(f_hat, T_s, af.lags[i]))
        << '\n';
}

std::string_view library_version() noexcept { return "0.1.0"; }

}  // namespace doppler
