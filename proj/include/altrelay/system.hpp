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
// Two-hop network model. The source S talks to the destination D through
// three half-duplex relays that alternate roles:
//
//   even slot n:  S -> {R1, R2} (M streams, precoder T_e), R3 -> D
//   odd slot n:   S -> R3 (M/2 streams, precoder T_o), {R1, R2} -> D
//
// Every relay applies a fixed amplifying matrix F_i to what it received one
// slot earlier and retransmits under a power constraint. The destination
// applies the MSE-optimal linear filter; the resulting per-slot mutual
// information is log2 det E^{-1} with E the MSE matrix.

#pragma once

#include "altrelay/channel.hpp"
#include "altrelay/linalg.hpp"

namespace altrelay {

// Static parameters of every node.
struct NodeConfig {
    int M = 2;                  // antennas per node, even
    double P_S = 1.0;           // source power budget per transmission
    double P_R = 1.0;           // per-relay power budget
    double sigma_relay[3] = {1.0, 1.0, 1.0}; // relay noise variances sigma_i^2
    double sigma_dest = 1.0;    // destination noise variance sigma_D^2
};

// All filters of the network plus their power-normalization state.
//   T_e : M x M     source precoder for even slots
//   T_o : M x (M/2) source precoder for odd slots
//   F_i : M x M     relay amplifiers
//   p_e, p_o        source normalizers, p_t = P_S / tr{T T^H}
//   p_i             relay normalizers, p_i = P_R / tr{F_i Sigma_i F_i^H}
//   Sigma_i         covariance of the signal each relay received
struct FilterBank {
    cmat T_e, T_o;
    cmat F_1, F_2, F_3;
    double p_e = 0.0, p_o = 0.0;
    double p_1 = 0.0, p_2 = 0.0, p_3 = 0.0;
    cmat Sigma_1, Sigma_2, Sigma_3;
};

// Parity of the slot on which data reaches the destination. Even slots
// deliver the odd-slot source data through R3 (M/2 streams); odd slots
// deliver the even-slot source data through R1 and R2 (M streams).
enum class DeliveryParity { even, odd };

// p_t = P_S / tr{T T^H}. Raises DegenerateInput when T is (numerically) zero.
double source_power_factor(const cmat& T, double P_S);

// Covariance of the signal a relay captures, assuming the inter-relay
// interference has been aligned away:
//   Sigma_i = p_t H_iS T T^H H_iS^H + sigma_i^2 I.
cmat relay_input_covariance(const cmat& H_iS, const cmat& T, double p_t,
                            double sigma_i2);

// p_i = P_R / tr{F_i Sigma_i F_i^H}. Raises DegenerateInput when F_i = 0.
double relay_power_factor(const cmat& F_i, const cmat& Sigma_i, double P_R);

// Effective source-to-destination channel of the delivery slot:
//   even:  H_o = sqrt(p_3) H_D3 F_3 H_3S T_o          (M x M/2)
//   odd:   H_e = sum_i sqrt(p_i) H_Di F_i H_iS T_e    (M x M)
cmat effective_channel(const FilterBank& bank, const ChannelSet& ch,
                       DeliveryParity parity);

// Covariance of the amplified-noise-plus-destination-noise term:
//   even:  Sigma_o = sigma_3^2 p_3 H_D3 F_3 F_3^H H_D3^H + sigma_D^2 I
//   odd:   Sigma_e = sum_i sigma_i^2 p_i H_Di F_i F_i^H H_Di^H + sigma_D^2 I
cmat noise_covariance(const FilterBank& bank, const ChannelSet& ch,
                      DeliveryParity parity, const NodeConfig& cfg);

// MSE matrix under the MSE-optimal destination filter:
//   E = (I + p_t H^H Sigma^{-1} H)^{-1}.
// The parity pins the expected stream count: M/2 columns for even delivery,
// M for odd delivery.
cmat mse_matrix(const cmat& H_eff, const cmat& Sigma_noise, double p_t,
                DeliveryParity parity);

// MSE-optimal linear destination filter:
//   W_D = (p_t H H^H + Sigma)^{-1} sqrt(p_t) H.
cmat wiener_filter(const cmat& H_eff, const cmat& Sigma_noise, double p_t);

// MSE matrix of an arbitrary destination filter W applied to
// y = sqrt(p_t) H s + z with E{s s^H} = I and E{z z^H} = Sigma:
//   E(W) = I - sqrt(p_t) W^H H - sqrt(p_t) H^H W + W^H (p_t H H^H + Sigma) W.
// With W = wiener_filter(...) this reproduces mse_matrix(...).
cmat mse_of_filter(const cmat& W, const cmat& H_eff, const cmat& Sigma_noise,
                   double p_t);

// Achievable rate of one delivery, I = log2 det E^{-1}, in bits/s/Hz.
double sum_rate(const cmat& E);

// Achievable rate of one delivery straight from the channel and noise
// covariance, I = log2 det(I + p_t H^H Sigma^{-1} H), in bits/s/Hz. Equals
// sum_rate(mse_matrix(...)) but stays stable when the product p_t H^H H is
// both enormous and rank deficient, where the explicitly formed MSE matrix
// has eigenvalues below its own rounding floor.
double delivered_rate(const cmat& H_eff, const cmat& Sigma_noise, double p_t,
                      DeliveryParity parity);

// Largest scale-free leakage among the three zero-interference constraint
// operators
//   F_3 (H_31 F_1 + H_32 F_2),   F_1 H_13 F_3,   F_2 H_23 F_3,
// each normalized by the Frobenius norms of its factors. Filter banks built
// by the alignment module stay below 1e-10.
double interference_residual(const FilterBank& bank, const ChannelSet& ch);

// Average delivered rate of one even/odd slot pair under a static channel:
//   1/2 (I_o + I_e).
// Raises InterferenceNotCancelled when interference_residual >= 1e-8.
double two_slot_rate(const FilterBank& bank, const ChannelSet& ch,
                     const NodeConfig& cfg);

// Fills p_e, p_o, Sigma_i and p_i of a bank whose filters are already set,
// using the channels over which each relay listens. A zero amplifier gets
// p_i = 0 (the relay stays silent) instead of raising, so degenerate
// parameter points remain evaluable.
void complete_bank(FilterBank& bank, const ChannelSet& ch,
                   const NodeConfig& cfg);

} // namespace altrelay
