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

#include "altrelay/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace altrelay {

namespace {

constexpr double kResidualGate = 1e-8;
constexpr int kMaxResampleAttempts = 32;

// ---------------------------------------------------------------------------
// Windowed evaluation under block fading
// ---------------------------------------------------------------------------

// Filters in effect over one simulated window, one entry per slot pair
// (2m, 2m+1): the source precoders, the relay amplifiers, and the receive
// factors needed to verify that inter-relay interference really cancels.
struct WindowFilters {
    std::vector<cmat> T_e, F_1, F_2; // even-slot data and its odd-slot delivery
    std::vector<cmat> T_o, F_3;      // odd-slot data and its even-slot delivery
    std::vector<cmat> rxW1, rxW2;    // relays 1, 2 receive factors (even slots)
    std::vector<cmat> W3_rx;         // relay 3 receive factor (odd slots)
};

// Delivered rate of one relaying side across a slot boundary: the data
// arrived over the backward channels of rx_ch and is forwarded over the
// forward channels of tx_ch. Parity names the delivery slot: even carries
// the odd-slot data (T_o through F_3), odd carries the even-slot data (T_e
// through F_1 and F_2). Power normalization and amplified noise follow the
// same bank conventions as the static-channel path.
double side_rate(const cmat& T, const std::vector<const cmat*>& F,
                 const ChannelSet& rx_ch, const ChannelSet& tx_ch,
                 DeliveryParity parity, const NodeConfig& node)
{
    ChannelSet mixed = tx_ch;
    mixed.H_1S = rx_ch.H_1S;
    mixed.H_2S = rx_ch.H_2S;
    mixed.H_3S = rx_ch.H_3S;

    const Eigen::Index M = node.M;
    const Eigen::Index h = M / 2;
    FilterBank bank;
    if (parity == DeliveryParity::even) {
        bank.T_o = T;
        bank.F_3 = *F[0];
        bank.T_e = cmat::Zero(M, M);
        bank.F_1 = cmat::Zero(M, M);
        bank.F_2 = cmat::Zero(M, M);
    } else {
        bank.T_e = T;
        bank.F_1 = *F[0];
        bank.F_2 = *F[1];
        bank.T_o = cmat::Zero(M, h);
        bank.F_3 = cmat::Zero(M, M);
    }
    complete_bank(bank, mixed, node);

    const cmat H = effective_channel(bank, mixed, parity);
    const cmat S = noise_covariance(bank, mixed, parity, node);
    const double p_t = parity == DeliveryParity::even ? bank.p_o : bank.p_e;
    return delivered_rate(H, S, p_t, parity);
}

// Average delivered sum-rate over the window, excluding the warm-up pair.
// Every slot's interference leakage is verified first; the delivered-rate
// formulas assume it vanishes.
double windowed_rate(const std::vector<ChannelSet>& seq, const WindowFilters& w,
                     const NodeConfig& node)
{
    const std::size_t P = w.T_e.size();
    for (std::size_t m = 0; m < P; ++m) {
        const ChannelSet& che = seq[2 * m];
        const ChannelSet& cho = seq[2 * m + 1];
        const double leak_even =
            std::max(rx_leak_residual(w.rxW1[m], {che.H_13}, {w.F_3[m]}),
                     rx_leak_residual(w.rxW2[m], {che.H_23}, {w.F_3[m]}));
        const double leak_odd = rx_leak_residual(
            w.W3_rx[m], {cho.H_31, cho.H_32}, {w.F_1[m], w.F_2[m]});
        if (leak_even > kResidualGate || leak_odd > kResidualGate)
            throw InterferenceNotCancelled(
                "windowed_rate: inter-relay leakage above tolerance");
    }

    double acc = 0.0;
    for (std::size_t m = 1; m < P; ++m) {
        const double I_o = side_rate(w.T_o[m - 1], {&w.F_3[m]}, seq[2 * m - 1],
                                     seq[2 * m], DeliveryParity::even, node);
        const double I_e = side_rate(w.T_e[m], {&w.F_1[m], &w.F_2[m]}, seq[2 * m],
                                     seq[2 * m + 1], DeliveryParity::odd, node);
        acc += 0.5 * (I_o + I_e);
    }
    return acc / static_cast<double>(P - 1);
}

WindowFilters window_from_naive(const std::vector<ChannelSet>& seq,
                                const NodeConfig& node)
{
    const Eigen::Index M = node.M;
    const Eigen::Index h = M / 2;
    const PerSlotParamsEven pe = naive_even_params(static_cast<int>(M));
    const PerSlotParamsOdd po = naive_odd_params(static_cast<int>(M));

    WindowFilters w;
    EvenSlotInput eprev;
    eprev.T_o = cmat::Zero(M, h);
    eprev.W_3 = cmat::Zero(M, h);
    for (std::size_t m = 0; 2 * m + 1 < seq.size(); ++m) {
        const EvenSlotBuild eb = build_even(pe, seq[2 * m], eprev);
        OddSlotInput oprev{pe.T_e, eb.W_1, eb.W_2};
        const OddSlotBuild ob = build_odd(po, seq[2 * m + 1], oprev);
        eprev.T_o = ob.T_o;
        eprev.W_3 = ob.W_3;

        w.T_e.push_back(pe.T_e);
        w.F_1.push_back(ob.F_1);
        w.F_2.push_back(ob.F_2);
        w.T_o.push_back(ob.T_o);
        w.F_3.push_back(eb.F_3);
        w.rxW1.push_back(eb.W_1);
        w.rxW2.push_back(eb.W_2);
        w.W3_rx.push_back(ob.W_3);
    }
    return w;
}

WindowFilters window_from_iterII(const AlgorithmIIRun& run)
{
    WindowFilters w;
    const std::size_t P = std::min(run.even.size(), run.odd.size());
    for (std::size_t m = 0; m < P; ++m) {
        w.T_e.push_back(run.even[m].params.T_e);
        w.F_1.push_back(run.odd[m].F_1);
        w.F_2.push_back(run.odd[m].F_2);
        w.T_o.push_back(run.odd[m].params.T_o);
        w.F_3.push_back(run.even[m].F_3);
        w.rxW1.push_back(run.even[m].W_1);
        w.rxW2.push_back(run.even[m].W_2);
        w.W3_rx.push_back(run.odd[m].W_3);
    }
    return w;
}

WindowFilters window_from_distributed(const std::vector<DistributedPairResult>& pairs,
                                      const NodeConfig& node)
{
    const Eigen::Index M = node.M;
    const cmat T_e = cmat::Identity(M, M);
    const cmat T_o = cmat::Identity(M, M).leftCols(M / 2);

    WindowFilters w;
    for (const auto& pr : pairs) {
        w.T_e.push_back(T_e);
        w.F_1.push_back(pr.F_1);
        w.F_2.push_back(pr.F_2);
        w.T_o.push_back(T_o);
        w.F_3.push_back(pr.F_3);
        w.rxW1.push_back(pr.Ubar_1);
        w.rxW2.push_back(pr.Ubar_2);
        w.W3_rx.push_back(pr.W_3_next);
    }
    return w;
}

// ---------------------------------------------------------------------------
// One trial
// ---------------------------------------------------------------------------

InitConfig init_for(const ExperimentConfig& cfg, std::uint64_t trial)
{
    InitConfig init;
    init.pure_random = cfg.pure_random_init;
    init.seed = cfg.seed;
    init.stream = trial;
    return init;
}

double trial_body(const ExperimentConfig& cfg, const NodeConfig& node,
                  std::uint64_t trial, const std::vector<ChannelSet>& seq)
{
    switch (cfg.scenario) {
    case FadingScenario::SlowFading: {
        const ChannelSet& ch = seq.front();
        switch (cfg.scheme) {
        case Scheme::proposed_naive: {
            const FilterBank bank = build_slow(naive_params(cfg.M), ch, node);
            return two_slot_rate(bank, ch, node);
        }
        case Scheme::proposed_iterI: {
            const AlgorithmIResult r =
                iterative_algorithm_I(ch, node, cfg.armijo, init_for(cfg, trial));
            return two_slot_rate(r.bank, ch, node);
        }
        case Scheme::conventional_af_naive:
            return conventional_af_rate(ch, ch, 1, node);
        case Scheme::best_relay_naive:
            return best_relay_rate(ch, ch, node);
        default:
            throw InvalidDimension(
                "trial_rate: this scheme needs a block-fading scenario");
        }
    }
    case FadingScenario::BlockPerSlot:
    case FadingScenario::BlockPerTwoSlots: {
        switch (cfg.scheme) {
        case Scheme::proposed_naive:
            return windowed_rate(seq, window_from_naive(seq, node), node);
        case Scheme::proposed_iterII: {
            if (cfg.scenario != FadingScenario::BlockPerSlot)
                throw InvalidDimension(
                    "trial_rate: the per-slot design expects per-slot fading");
            const AlgorithmIIRun run = iterative_algorithm_II(
                seq, node, cfg.armijo, init_for(cfg, trial));
            return windowed_rate(seq, window_from_iterII(run), node);
        }
        case Scheme::proposed_distributed: {
            if (cfg.scenario != FadingScenario::BlockPerTwoSlots)
                throw InvalidDimension(
                    "trial_rate: the distributed design expects reciprocal "
                    "per-two-slot fading");
            const auto pairs = distributed_algorithm(seq, node, cfg.armijo,
                                                     init_for(cfg, trial));
            return windowed_rate(seq, window_from_distributed(pairs, node), node);
        }
        case Scheme::conventional_af_naive:
        case Scheme::best_relay_naive: {
            double acc = 0.0;
            std::size_t pairs = 0;
            for (std::size_t m = 1; 2 * m + 1 < seq.size(); ++m) {
                acc += cfg.scheme == Scheme::conventional_af_naive
                           ? conventional_af_rate(seq[2 * m], seq[2 * m + 1], 1,
                                                  node)
                           : best_relay_rate(seq[2 * m], seq[2 * m + 1], node);
                ++pairs;
            }
            if (pairs == 0)
                throw InvalidDimension("trial_rate: window too short");
            return acc / static_cast<double>(pairs);
        }
        default:
            throw InvalidDimension(
                "trial_rate: this scheme needs static channels");
        }
    }
    }
    throw InvalidDimension("trial_rate: unknown fading scenario");
}

int slots_needed(const ExperimentConfig& cfg)
{
    return cfg.scenario == FadingScenario::SlowFading ? 1
                                                      : 2 * cfg.window_pairs;
}

std::vector<ChannelSet> draw_trial_channels(const ExperimentConfig& cfg,
                                            std::uint64_t trial,
                                            std::uint64_t purpose)
{
    GaussianStream rng(cfg.seed, trial, purpose);
    return draw_channel_sequence(cfg.scenario, cfg.M, slots_needed(cfg), rng);
}

} // namespace

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

std::string scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::proposed_iterI: return "proposed_iterI";
    case Scheme::proposed_iterII: return "proposed_iterII";
    case Scheme::proposed_distributed: return "proposed_distributed";
    case Scheme::proposed_naive: return "proposed_naive";
    case Scheme::best_relay_naive: return "best_relay_naive";
    case Scheme::conventional_af_naive: return "conventional_af_naive";
    }
    return "unknown";
}

bool scheme_from_name(const std::string& name, Scheme& out)
{
    const Scheme all[] = {Scheme::proposed_iterI,       Scheme::proposed_iterII,
                          Scheme::proposed_distributed, Scheme::proposed_naive,
                          Scheme::best_relay_naive,
                          Scheme::conventional_af_naive};
    for (Scheme s : all)
        if (scheme_name(s) == name) {
            out = s;
            return true;
        }
    return false;
}

std::string scenario_name(FadingScenario s)
{
    switch (s) {
    case FadingScenario::SlowFading: return "slow_fading";
    case FadingScenario::BlockPerSlot: return "block_per_slot";
    case FadingScenario::BlockPerTwoSlots: return "block_per_two_slots";
    }
    return "unknown";
}

bool scenario_from_name(const std::string& name, FadingScenario& out)
{
    const FadingScenario all[] = {FadingScenario::SlowFading,
                                  FadingScenario::BlockPerSlot,
                                  FadingScenario::BlockPerTwoSlots};
    for (FadingScenario s : all)
        if (scenario_name(s) == name) {
            out = s;
            return true;
        }
    return false;
}

std::string power_convention_name(PowerConvention p)
{
    return p == PowerConvention::equal ? "equal" : "two_slot";
}

bool power_convention_from_name(const std::string& name, PowerConvention& out)
{
    if (name == "equal") {
        out = PowerConvention::equal;
        return true;
    }
    if (name == "two_slot") {
        out = PowerConvention::two_slot;
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Node configuration
// ---------------------------------------------------------------------------

NodeConfig node_config_for(const ExperimentConfig& cfg, double snr_db)
{
    const double P = std::pow(10.0, snr_db / 10.0); // sigma^2 = 1
    NodeConfig node;
    node.M = cfg.M;
    if (cfg.power == PowerConvention::equal) {
        node.P_S = P;
        node.P_R = P;
    } else {
        node.P_S = 2.0 * P;
        node.P_R = 3.0 * P;
    }
    node.sigma_relay[0] = node.sigma_relay[1] = node.sigma_relay[2] = 1.0;
    node.sigma_dest = 1.0;
    return node;
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

double trial_rate(const ExperimentConfig& cfg, const NodeConfig& node,
                  std::uint64_t trial)
{
    const auto seq = draw_trial_channels(
        cfg, trial, static_cast<std::uint64_t>(StreamPurpose::channels));
    return trial_body(cfg, node, trial, seq);
}

double trial_rate_resampled(const ExperimentConfig& cfg, const NodeConfig& node,
                            std::uint64_t trial, int& resamples)
{
    try {
        return trial_rate(cfg, node, trial);
    } catch (const NumericalError&) {
    }
    for (int attempt = 1; attempt <= kMaxResampleAttempts; ++attempt) {
        ++resamples;
        const std::uint64_t purpose =
            static_cast<std::uint64_t>(StreamPurpose::resample_base) +
            static_cast<std::uint64_t>(attempt - 1);
        try {
            const auto seq = draw_trial_channels(cfg, trial, purpose);
            return trial_body(cfg, node, trial, seq);
        } catch (const NumericalError&) {
        }
    }
    throw NumericalError("trial_rate_resampled: trial " + std::to_string(trial) +
                         " still failing after " +
                         std::to_string(kMaxResampleAttempts) + " redraws");
}

namespace {

MetricSeries run_trials_impl(const ExperimentConfig& cfg, int workers,
                             bool parallel)
{
    if (cfg.trials < 1)
        throw InvalidDimension("run_trials: at least one trial is required");
    if (cfg.snr_grid_db.empty())
        throw InvalidDimension("run_trials: empty SNR grid");

    const int n = cfg.trials;
    const long cap = std::max<long>(
        1, static_cast<long>(0.01 * static_cast<double>(n) *
                             static_cast<double>(cfg.snr_grid_db.size())));

    MetricSeries out;
    long total_resamples = 0;
    for (double snr : cfg.snr_grid_db) {
        const NodeConfig node = node_config_for(cfg, snr);
        std::vector<double> rates(static_cast<std::size_t>(n), 0.0);
        std::vector<int> res(static_cast<std::size_t>(n), 0);
        std::vector<std::string> errors(static_cast<std::size_t>(n));

#ifdef _OPENMP
        const int nthreads =
            parallel ? (workers > 0 ? workers : omp_get_max_threads()) : 1;
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#else
        (void)workers;
        (void)parallel;
#endif
        for (int t = 0; t < n; ++t) {
            try {
                rates[static_cast<std::size_t>(t)] = trial_rate_resampled(
                    cfg, node, static_cast<std::uint64_t>(t),
                    res[static_cast<std::size_t>(t)]);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(t)] = e.what();
            }
        }

        for (const auto& msg : errors)
            if (!msg.empty())
                throw NumericalError("run_trials: " + msg);
        for (int r : res)
            total_resamples += r;
        if (total_resamples > cap)
            throw ResampleCapExceeded(
                "run_trials: more than 1% of trials required channel redraws");

        double mean = 0.0;
        for (double r : rates)
            mean += r;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double r : rates)
            var += (r - mean) * (r - mean);
        const double std_err =
            n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) /
                        std::sqrt(static_cast<double>(n))
                  : 0.0;

        SnrRecord rec;
        rec.snr_db = snr;
        rec.ergodic_rate_bits = mean;
        rec.outage_prob = outage_probability(rates, cfg.outage_threshold_bits);
        rec.epsilon_outage_rate_bits =
            epsilon_outage_rate(rates, cfg.epsilon_outage);
        rec.n_trials = n;
        rec.rate_std_err = std_err;
        out.records.push_back(rec);
        out.samples.push_back(std::move(rates));
    }
    return out;
}

} // namespace

MetricSeries run_trials(const ExperimentConfig& cfg, int workers)
{
    return run_trials_impl(cfg, workers, true);
}

MetricSeries run_trials_serial(const ExperimentConfig& cfg)
{
    return run_trials_impl(cfg, 1, false);
}

// ---------------------------------------------------------------------------
// Metric reductions
// ---------------------------------------------------------------------------

double outage_probability(const std::vector<double>& samples, double I_out)
{
    if (samples.empty())
        throw InvalidDimension("outage_probability: no samples");
    std::size_t below = 0;
    for (double s : samples)
        if (s <= I_out)
            ++below;
    return static_cast<double>(below) / static_cast<double>(samples.size());
}

double binomial_halfwidth(double p, int n)
{
    if (n < 1)
        throw InvalidDimension("binomial_halfwidth: n must be positive");
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double epsilon_outage_rate(std::vector<double> samples, double eps)
{
    if (samples.empty())
        throw InvalidDimension("epsilon_outage_rate: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    // The tiny bias keeps k stable when eps * n lands on an integer that
    // binary floating point represents from below.
    long k = static_cast<long>(std::floor(eps * n + 1e-12));
    k = std::max<long>(1, std::min<long>(k, static_cast<long>(samples.size())));
    return samples[static_cast<std::size_t>(k - 1)];
}

double dof_estimate(double rate_lo_bits, double rate_hi_bits, double snr_lo_db,
                    double snr_hi_db)
{
    if (!(snr_hi_db > snr_lo_db))
        throw InvalidDimension("dof_estimate: SNR points must be ordered");
    const double log2_rho_span =
        (snr_hi_db - snr_lo_db) / 10.0 * std::log2(10.0);
    return (rate_hi_bits - rate_lo_bits) / log2_rho_span;
}

ConvergenceAggregate
convergence_aggregate(const std::vector<std::vector<double>>& traces)
{
    if (traces.empty())
        throw InvalidDimension("convergence_aggregate: no traces");
    std::size_t L = 0;
    for (const auto& t : traces) {
        if (t.empty())
            throw InvalidDimension("convergence_aggregate: empty trace");
        L = std::max(L, t.size());
    }

    ConvergenceAggregate agg;
    std::vector<double> column(traces.size());
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < traces.size(); ++j)
            column[j] = i < traces[j].size() ? traces[j][i] : traces[j].back();
        double mean = 0.0;
        for (double v : column)
            mean += v;
        agg.mean.push_back(mean / static_cast<double>(column.size()));

        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        const auto idx = [&](double q) {
            const double pos = q * static_cast<double>(sorted.size() - 1);
            return static_cast<std::size_t>(std::llround(pos));
        };
        agg.p10.push_back(sorted[idx(0.10)]);
        agg.p90.push_back(sorted[idx(0.90)]);
    }
    return agg;
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

namespace {

struct TrialTraces {
    std::map<std::string, std::vector<OptimizerTrace>> groups;
};

TrialTraces trace_body(const ExperimentConfig& cfg, const NodeConfig& node,
                       std::uint64_t trial, const std::vector<ChannelSet>& seq)
{
    TrialTraces out;
    switch (cfg.scheme) {
    case Scheme::proposed_iterI: {
        const AlgorithmIResult r =
            iterative_algorithm_I(seq.front(), node, cfg.armijo,
                                  init_for(cfg, trial));
        out.groups["main"].push_back(r.trace);
        return out;
    }
    case Scheme::proposed_iterII: {
        const AlgorithmIIRun run =
            iterative_algorithm_II(seq, node, cfg.armijo, init_for(cfg, trial));
        for (const auto& e : run.even)
            out.groups["even"].push_back(e.trace);
        for (const auto& o : run.odd)
            out.groups["odd"].push_back(o.trace);
        return out;
    }
    case Scheme::proposed_distributed: {
        const auto pairs = distributed_algorithm(seq, node, cfg.armijo,
                                                 init_for(cfg, trial));
        for (const auto& pr : pairs) {
            if (!pr.trace_B3.objective_bits.empty())
                out.groups["case1"].push_back(pr.trace_B3);
            out.groups["case2"].push_back(pr.trace_xi1);
            out.groups["case2"].push_back(pr.trace_xi2);
        }
        return out;
    }
    default:
        throw InvalidDimension(
            "run_convergence: scheme has no iterative optimizer");
    }
}

TrialTraces trial_traces_resampled(const ExperimentConfig& cfg,
                                   const NodeConfig& node, std::uint64_t trial)
{
    try {
        const auto seq = draw_trial_channels(
            cfg, trial, static_cast<std::uint64_t>(StreamPurpose::channels));
        return trace_body(cfg, node, trial, seq);
    } catch (const NumericalError&) {
    }
    for (int attempt = 1; attempt <= kMaxResampleAttempts; ++attempt) {
        const std::uint64_t purpose =
            static_cast<std::uint64_t>(StreamPurpose::resample_base) +
            static_cast<std::uint64_t>(attempt - 1);
        try {
            const auto seq = draw_trial_channels(cfg, trial, purpose);
            return trace_body(cfg, node, trial, seq);
        } catch (const NumericalError&) {
        }
    }
    throw NumericalError("run_convergence: trial " + std::to_string(trial) +
                         " still failing after repeated redraws");
}

} // namespace

ConvergenceStudy run_convergence(const ExperimentConfig& cfg, int workers)
{
    if (cfg.trials < 1)
        throw InvalidDimension("run_convergence: at least one run is required");
    if (cfg.snr_grid_db.empty())
        throw InvalidDimension("run_convergence: empty SNR grid");

    const NodeConfig node = node_config_for(cfg, cfg.snr_grid_db.front());
    const int n = cfg.trials;
    std::vector<TrialTraces> per_trial(static_cast<std::size_t>(n));
    std::vector<std::string> errors(static_cast<std::size_t>(n));

#ifdef _OPENMP
    const int nthreads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#else
    (void)workers;
#endif
    for (int t = 0; t < n; ++t) {
        try {
            per_trial[static_cast<std::size_t>(t)] = trial_traces_resampled(
                cfg, node, static_cast<std::uint64_t>(t));
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(t)] = e.what();
        }
    }
    for (const auto& msg : errors)
        if (!msg.empty())
            throw NumericalError("run_convergence: " + msg);

    ConvergenceStudy study;
    for (const auto& tt : per_trial)
        for (const auto& [group, traces] : tt.groups)
            for (const auto& tr : traces)
                study.groups[group].push_back(tr);

    for (const auto& [group, traces] : study.groups) {
        std::vector<std::vector<double>> series;
        series.reserve(traces.size());
        for (const auto& tr : traces)
            series.push_back(tr.objective_bits);
        study.aggregates[group] = convergence_aggregate(series);
    }
    return study;
}

} // namespace altrelay
