// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "doppler/channel.hpp"
#include "doppler/error.hpp"
#include "doppler/harness.hpp"
#include "doppler/io.hpp"
#include "doppler/rng.hpp"

using namespace doppler;

namespace {

bool rejected(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const Error& e) {
    return e.code() == ErrorCode::InvalidArgument;
  }
  return false;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Config, ParsesNestedBase) {
  const SweepSpec s = parse_run_config(R"({
    "axis": "snr_db", "values": [0, 10, 20], "trials": 7,
    "base": {"n_t": 1, "n_r": 4, "N": 5000, "constellation": "16QAM", "seed": 12},
    "estimators": ["mbe_equal", "mbe_optimal"],
    "grid": {"u_min": 3, "u_s": 5},
    "search": {"f_h": 3000},
    "n_b": 40, "diagonal_covariance": true
  })");
  EXPECT_EQ(s.axis, SweepAxis::SnrDb);
  EXPECT_EQ(s.values, (std::vector<double>{0, 10, 20}));
  EXPECT_EQ(s.trials, 7);
  EXPECT_EQ(s.base.n_r, 4);
  EXPECT_EQ(s.base.constellation, "16QAM");
  EXPECT_EQ(s.master_seed, 12u);
  EXPECT_EQ(s.grid.u_min, 3);
  EXPECT_EQ(s.grid.u_s, 5);
  EXPECT_EQ(s.search.f_h, 3000.0);
  EXPECT_EQ(s.search.f_l, 50.0);
  EXPECT_EQ(s.n_b, 40);
  EXPECT_TRUE(s.diagonal_covariance);
}

TEST(Config, FlatScenarioKeysAndSeed) {
  const SweepSpec s = parse_run_config(R"({"values": [0.01], "f_D": 77, "L": 3, "master_seed": 5, "seed": 4})");
  EXPECT_EQ(s.base.L, 3);
  EXPECT_EQ(s.base.seed, 4u);
  EXPECT_EQ(s.master_seed, 5u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_TRUE(rejected("{not json"));
  EXPECT_TRUE(rejected("[1, 2]"));
  EXPECT_TRUE(rejected(R"({"values": [1], "trails": 3})"));
  EXPECT_TRUE(rejected(R"({"values": [1], "base": {"NN": 3}})"));
  EXPECT_TRUE(rejected(R"({"values": [1], "base": {}, "N": 3})"));
  EXPECT_TRUE(rejected(R"({"values": [1], "grid": {"umax": 3}})"));
  EXPECT_TRUE(rejected(R"({"values": [1], "trials": "many"})"));
  EXPECT_TRUE(rejected(R"({"values": [1], "axis": "speed"})"));
}

TEST(Csv, Headers) {
  std::ostringstream trials, summary;
  write_trials_csv(trials, {});
  write_summary_csv(summary, {});
  EXPECT_EQ(trials.str(), "axis,estimator,trial,f_true_hz,f_hat_hz,wall_s,status\n");
  EXPECT_EQ(summary.str(), "axis,estimator,trials,failures,nrmse,mean_ratio,crlb_hz2\n");
}

TEST(Csv, SummaryRowFormatting) {
  SummaryRow a;
  a.axis_value = 0.01;
  a.estimator = "mbe_equal";
  a.trials = 10;
  a.failures = 1;
  a.nrmse = 0.25;
  a.mean_ratio = 1.5;
  SummaryRow b;
  b.axis_value = 0.01;
  b.estimator = "crlb_da";
  b.nrmse = 0.125;
  b.crlb = 4.0;
  std::ostringstream out;
  const std::vector<SummaryRow> rows{a, b};
  write_summary_csv(out, rows);
  const std::string text = out.str();
  EXPECT_NE(text.find("\n0.01,mbe_equal,10,1,0.25,1.5,\n"), std::string::npos) << text;
  EXPECT_NE(text.find("\n0.01,crlb_da,0,0,0.125,,4\n"), std::string::npos) << text;
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Csv, ReceivedRoundTrip) {
  ScenarioSpec s;
  s.N = 50;
  s.n_r = 3;
  const Simulation sim = simulate(make_scenario(s), Rng(5));
  std::stringstream buf;
  write_received_csv(buf, sim.received);
  EXPECT_EQ(first_line(buf.str()), "n,k,re,im");
  const ReceivedBlock back = read_received_csv(buf);
  EXPECT_EQ(back.n_r, 3);
  EXPECT_EQ(back.N, 50);
  EXPECT_EQ(back.samples, sim.received.samples);
}

TEST(Csv, ReceivedRejectsGaps) {
  std::stringstream buf("n,k,re,im\n0,1,1,0\n0,3,1,0\n");
  EXPECT_THROW(read_received_csv(buf), Error);
}

TEST(Json, ReportsSerialize) {
  EstimateReport r;
  r.f_hat = 512.5;
  r.method = EstimatorMethod::MimoOptimal;
  r.diagnostics.note = "x";
  const std::string j = to_json(r, -1);
  EXPECT_NE(j.find("\"method\":\"mimo_optimal\""), std::string::npos) << j;
  EXPECT_NE(j.find("\"f_hat\":512.5"), std::string::npos) << j;
  BoundReport b;
  b.mode = BoundMode::Nda;
  const std::string k = to_json(b, -1);
  EXPECT_NE(k.find("\"crlb\":null"), std::string::npos) << k;
  EXPECT_NE(k.find("\"mode\":\"nda\""), std::string::npos) << k;
}

TEST(Json, ManifestEchoesSeed) {
  SweepSpec s;
  s.values = {0.01};
  s.master_seed = 31337;
  const std::string m = run_manifest(s, 4);
  EXPECT_NE(m.find("31337"), std::string::npos);
  EXPECT_NE(m.find(std::string(library_version())), std::string::npos);
}
