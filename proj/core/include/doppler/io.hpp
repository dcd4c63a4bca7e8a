// Copyright 2026 The dopplerspread Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "doppler/channel.hpp"
#include "doppler/harness.hpp"
#include "doppler/likelihood.hpp"
#include "doppler/moments.hpp"
#include "doppler/search.hpp"

namespace doppler {

/// Parses a JSON run document. Scenario fields (n_t, n_r, L, f_D, T_s, N,
/// constellation, symbol_powers, noise_vars, delay_profile, seed, plus the
/// snr_db and l_rms helpers) go under "base" or at the top level; sweep
/// and estimator settings (axis, values, trials, estimators, master_seed,
/// grid, search, n_b, diagonal_covariance, n_starts, n_mc, h_rel) sit at the
/// top level. Unknown keys are rejected.
SweepSpec parse_run_config(std::string_view json_text);
SweepSpec load_run_config(const std::string& path);

std::string to_json(const EstimateReport& report, int indent = 2);
std::string to_json(const BoundReport& report, int indent = 2);
std::string to_json(const ScenarioConfig& config, int indent = 2);

/// Config echo, master seed and version strings.
std::string run_manifest(const SweepSpec& spec, int threads);

/// Formats a double with round-trip precision; NaN prints as "nan".
std::string format_number(double v);

void write_trials_csv(std::ostream& out, std::span<const TrialResult> trials);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Columns n,k,re,im with k starting at 1.
void write_received_csv(std::ostream& out, const ReceivedBlock& block);
ReceivedBlock read_received_csv(std::istream& in);

/// Columns u,psi_hat,psi_model for a fitted AF estimate.
void write_af_csv(std::ostream& out, const AfEstimate& af, double f_hat, double T_s);

std::string_view library_version() noexcept;

}  // namespace doppler
