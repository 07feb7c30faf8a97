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
// Gradient-ascent filter design. Three procedures share one Armijo stepper:
//
//   * Algorithm I: static channels, joint ascent over the seven alignment
//     variables (U_b, U_w, G_1, G_2, G_3, T_e, T_o).
//   * Algorithm II: per-slot fading, alternating between the even-slot
//     problem (U_w, phi_3, T_e) and the odd-slot problem
//     (U_b, phi_1, phi_2, T_o), handing receive factors across slots.
//   * Distributed: per-two-slot fading with channel reciprocity; relay 3
//     ascends f4 over B_3 on even slots, and relays 1, 2 each ascend their
//     local rate over xi_i on odd slots using only local channels.
//
// Conventional one-relay baselines used for comparisons live here as well.

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "altrelay/gradients.hpp"
#include "altrelay/rng.hpp"

namespace altrelay {

// ---------------------------------------------------------------------------
// Armijo ascent step
// ---------------------------------------------------------------------------

struct ArmijoConfig {
    double zeta = 0.2;        // sufficient-increase coefficient, in (0, 1)
    double nu = 0.5;          // backtracking ratio, in (0, 1)
    double epsilon = 1e-2;    // stop when one sweep gains at most this (bits)
    int max_outer_iters = 100;
    int max_backtracks = 40;
};

struct ArmijoStep {
    cmat Z_new;
    double f_new = 0.0;
    double mu = 0.0;
    bool accepted = false;
};

// Backtracking line search along the conjugate-gradient ascent direction.
// Accepts the first step size mu = nu^m, m = 0, 1, ..., max_backtracks,
// satisfying
//     objective(Z + mu * grad) >= objective(Z) + zeta * mu * ||grad||_F^2.
// A zero gradient, or exhaustion of the backtracks, returns Z unchanged with
// accepted = false. Non-finite objective values reject the candidate step.
// f0 carries a precomputed objective(Z); pass NaN to have it evaluated here.
ArmijoStep armijo_step(const ScalarObjective& objective, const cmat& Z,
                       const cmat& grad, const ArmijoConfig& cfg,
                       double f0 = std::numeric_limits<double>::quiet_NaN());

// ---------------------------------------------------------------------------
// Traces and initialization
// ---------------------------------------------------------------------------

enum class StopReason { converged, max_iters, backtrack_failure };

struct OptimizerTrace {
    std::vector<std::string> variables;      // column labels for `steps`
    std::vector<double> objective_bits;      // [0] = start, one entry per sweep
    std::vector<std::vector<double>> steps;  // accepted mu per sweep/variable
    StopReason reason = StopReason::max_iters;
};

struct InitConfig {
    bool pure_random = false;  // default: perturbed protocol-default start
    double perturbation = 0.01;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;  // e.g. the Monte Carlo trial index
};

// Protocol-default parameters with a small seeded complex-Gaussian
// perturbation (or a pure Gaussian draw when init.pure_random is set).
SlowFadingParams initial_slow_params(int M, const InitConfig& init);

// ---------------------------------------------------------------------------
// Algorithm I: static channels
// ---------------------------------------------------------------------------

struct AlgorithmIResult {
    SlowFadingParams params;
    FilterBank bank;
    OptimizerTrace trace;
};

AlgorithmIResult iterative_algorithm_I(const ChannelSet& ch,
                                       const NodeConfig& cfg,
                                       const ArmijoConfig& acfg,
                                       const InitConfig& init);

// Same procedure from an explicit starting point (re-entry, warm starts).
AlgorithmIResult iterative_algorithm_I(const ChannelSet& ch,
                                       const NodeConfig& cfg,
                                       const ArmijoConfig& acfg,
                                       const SlowFadingParams& start);

// ---------------------------------------------------------------------------
// Algorithm II: per-slot fading
// ---------------------------------------------------------------------------

struct EvenSlotResult {
    PerSlotParamsEven params;
    cmat F_3;        // amplifier applied by relay 3 this slot
    cmat W_1, W_2;   // receive factors handed to the next odd slot
    OptimizerTrace trace;
};

struct OddSlotResult {
    PerSlotParamsOdd params;
    cmat F_1, F_2;   // amplifiers applied by relays 1 and 2 this slot
    cmat B_1, B_2;   // their transmit factors (for alignment diagnostics)
    cmat W_3;        // receive factor handed to the next even slot
    OptimizerTrace trace;
};

struct AlgorithmIIRun {
    std::vector<EvenSlotResult> even;  // entry m covers slot 2m
    std::vector<OddSlotResult> odd;    // entry m covers slot 2m + 1
};

// Runs the alternating per-slot design over the whole channel sequence.
// Slot 0 has no arrived data to forward, so its even-slot problem degenerates
// to the capture term alone; the zero-amplifier conventions make that
// automatic (relay 3 stays silent on slot 0).
AlgorithmIIRun iterative_algorithm_II(const std::vector<ChannelSet>& seq,
                                      const NodeConfig& cfg,
                                      const ArmijoConfig& acfg,
                                      const InitConfig& init);

// ---------------------------------------------------------------------------
// Distributed design: per-two-slot fading with reciprocity
// ---------------------------------------------------------------------------

struct DistributedPairResult {
    cmat B_3;        // relay 3's even-slot transmit factor for this pair
    cmat F_3;        // its even-slot amplifier (zero on the bootstrap pair)
    cmat W_3_next;   // conj(B_3): receive factor for the pair's odd slot
    cmat Ubar_1, Ubar_2;
    cmat xi_1, xi_2;
    cmat F_1, F_2;   // odd-slot amplifiers of relays 1 and 2
    OptimizerTrace trace_B3;   // empty on the bootstrap pair
    OptimizerTrace trace_xi1;
    OptimizerTrace trace_xi2;
};

// Requires an even-length sequence whose pairs hold channels fixed and
// reciprocal (H_3i = H_i3^T); throws ReciprocityViolation otherwise. The
// first pair bootstraps B_3 with a random orthonormal draw and performs no
// even-slot optimization, since no data has arrived yet.
std::vector<DistributedPairResult>
distributed_algorithm(const std::vector<ChannelSet>& seq, const NodeConfig& cfg,
                      const ArmijoConfig& acfg, const InitConfig& init);

// ---------------------------------------------------------------------------
// One-relay baselines
// ---------------------------------------------------------------------------

// Conventional two-slot amplify-and-forward through relay k (1-based):
// the source sends all M streams with T = I_M in the first slot, the relay
// forwards with a power-scaled identity in the second. rx/tx name the
// channel sets of the receive and forward slots (equal under static fading).
double conventional_af_rate(const ChannelSet& rx, const ChannelSet& tx,
                            int relay_index, const NodeConfig& cfg);

// Best of the three single-relay rates for one coherence block.
double best_relay_rate(const ChannelSet& rx, const ChannelSet& tx,
                       const NodeConfig& cfg);

} // namespace altrelay
