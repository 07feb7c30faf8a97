// SPDX-License-Identifier: Apache-2.0
//
// altrelay: link-level simulator and filter designer for alternate MIMO
// amplify-and-forward relay networks with inter-relay interference alignment
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.
// ------------------------------------------------------------------------------
//
// Monte Carlo harness. Draws channel realizations, runs the selected filter
// design, and reduces per-trial delivered rates into ergodic rate, outage
// probability, epsilon-outage rate, and pre-log (DOF) estimates over an SNR
// grid. Channel draws depend only on (seed, trial), never on the scheme or
// the SNR point, so scheme curves are paired sample-by-sample.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "altrelay/optimizer.hpp"

namespace altrelay {

// ---------------------------------------------------------------------------
// Experiment description
// ---------------------------------------------------------------------------

enum class Scheme {
    proposed_iterI,        // static channels, Algorithm I
    proposed_iterII,       // per-slot fading, Algorithm II
    proposed_distributed,  // per-two-slot fading, decentralized design
    proposed_naive,        // alternate relaying with untuned filters
    best_relay_naive,      // best of three one-relay links per block
    conventional_af_naive, // one fixed relay, two-slot AF
};

enum class PowerConvention {
    equal,    // P_S = P_R = P
    two_slot, // P_S = 2P, P_R = 3P (classic budget split of one-relay AF)
};

std::string scheme_name(Scheme s);
bool scheme_from_name(const std::string& name, Scheme& out);
std::string scenario_name(FadingScenario s);
bool scenario_from_name(const std::string& name, FadingScenario& out);
std::string power_convention_name(PowerConvention p);
bool power_convention_from_name(const std::string& name, PowerConvention& out);

struct ExperimentConfig {
    FadingScenario scenario = FadingScenario::SlowFading;
    Scheme scheme = Scheme::proposed_naive;
    int M = 4;
    std::vector<double> snr_grid_db = {0, 5, 10, 15, 20, 25, 30};
    int trials = 500;
    std::uint64_t seed = 1;
    PowerConvention power = PowerConvention::equal;
    double outage_threshold_bits = 2.0; // I_out
    double epsilon_outage = 0.1;
    ArmijoConfig armijo;
    bool pure_random_init = false;
    // Slot pairs simulated per trial under block fading; the first pair only
    // warms the forwarding pipeline up and is excluded from the average.
    int window_pairs = 5;
};

// Noise variances are fixed at 1, so the SNR rho = P / sigma^2 sets P
// directly and the power convention splits it between source and relays.
NodeConfig node_config_for(const ExperimentConfig& cfg, double snr_db);

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

struct SnrRecord {
    double snr_db = 0.0;
    double ergodic_rate_bits = 0.0;
    double outage_prob = 0.0;
    double epsilon_outage_rate_bits = 0.0;
    int n_trials = 0;
    double rate_std_err = 0.0;
};

struct MetricSeries {
    std::vector<SnrRecord> records;
    std::vector<std::vector<double>> samples; // raw rates, per grid point
};

// Raised when more than 1% of the requested trials needed their channels
// redrawn due to numerical failures; results would no longer be trustworthy.
struct ResampleCapExceeded : NumericalError {
    using NumericalError::NumericalError;
};

// Delivered sum-rate of one Monte Carlo trial, in bits/s/Hz. Deterministic in
// (cfg.seed, trial). Throws NumericalError on a degenerate channel draw; the
// caller is expected to resample via trial_rate_resampled.
double trial_rate(const ExperimentConfig& cfg, const NodeConfig& node,
                  std::uint64_t trial);

// Same, but redraws the trial's channels (deterministically, from a purpose
// stream keyed by the attempt number) when a draw fails. `resamples` is
// incremented once per redraw.
double trial_rate_resampled(const ExperimentConfig& cfg, const NodeConfig& node,
                            std::uint64_t trial, int& resamples);

// Full sweep over cfg.snr_grid_db. `workers` caps the parallel trial loop
// (0 = all available); the result is identical for every worker count.
MetricSeries run_trials(const ExperimentConfig& cfg, int workers = 0);

// Reference implementation of the same reduction with a plain serial loop.
// Exists to pin down that parallel execution changes nothing, bit for bit.
MetricSeries run_trials_serial(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Metric reductions
// ---------------------------------------------------------------------------

// Empirical Pr[rate <= I_out].
double outage_probability(const std::vector<double>& samples, double I_out);

// 1.96 sqrt(p (1 - p) / n): normal-approximation half-width of the outage
// estimate at 95% confidence.
double binomial_halfwidth(double p, int n);

// Largest threshold with empirical outage at most eps: the k-th smallest
// sample with k = max(1, floor(eps n)).
double epsilon_outage_rate(std::vector<double> samples, double eps);

// Pre-log slope between two high-SNR ergodic rates:
//   (rate_hi - rate_lo) / (log2 rho_hi - log2 rho_lo).
double dof_estimate(double rate_lo_bits, double rate_hi_bits, double snr_lo_db,
                    double snr_hi_db);

struct ConvergenceAggregate {
    std::vector<double> mean;
    std::vector<double> p10;
    std::vector<double> p90;
};

// Per-iteration mean and decile band over objective traces; traces shorter
// than the longest are padded with their own final value.
ConvergenceAggregate
convergence_aggregate(const std::vector<std::vector<double>>& traces);

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

// Runs cfg.trials seeded designs at the first SNR grid point and collects the
// optimizer traces, grouped by sub-problem: "main" for Algorithm I; "even"
// and "odd" for Algorithm II; "case1" (B_3) and "case2" (xi) for the
// distributed design. Aggregates accompany each group.
struct ConvergenceStudy {
    std::map<std::string, std::vector<OptimizerTrace>> groups;
    std::map<std::string, ConvergenceAggregate> aggregates;
};

ConvergenceStudy run_convergence(const ExperimentConfig& cfg, int workers = 0);

} // namespace altrelay
