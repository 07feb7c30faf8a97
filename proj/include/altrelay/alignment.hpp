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
// Interference alignment by construction. Every relay amplifier is the rank
// M/2 product F_i = B_i W_i^H of a transmit factor B_i and a receive factor
// W_i. The factors are parameterized so the inter-relay interference always
// lands in subspaces the receive factors annihilate:
//
//   relays 1, 2:  B_i = H_3i^{-1} U_b phi_i   (alignment at relay 3: the two
//                 interference images H_31 B_1 and H_32 B_2 both span U_b)
//                 W_i = H_i3^{-H} U_w psi_i
//   relay 3:      B_3 = U_w^perp phi_3        (so H_i3 B_3 is annihilated by
//                 W_i^H for any psi_i)
//                 W_3 = U_b^perp psi_3        (annihilates the aligned span)
//
// U_b and U_w are free M x (M/2) bases; phi/psi are free mixing blocks.

#pragma once

#include "altrelay/channel.hpp"
#include "altrelay/linalg.hpp"
#include "altrelay/system.hpp"

namespace altrelay {

// Variables of the static-channel joint design. The mixing blocks are folded
// into G_i = phi_i psi_i^H for relays 1 and 2, and G_3 sits between the two
// complement projectors: F_3 = U_w^perp G_3 U_b^perp.
struct SlowFadingParams {
    cmat U_b, U_w;   // M x (M/2), full column rank
    cmat G_1, G_2;   // (M/2) x (M/2)
    cmat G_3;        // M x M
    cmat T_e;        // M x M
    cmat T_o;        // M x (M/2)
};

// Variables optimized on an even slot when the channel changes every slot.
// psi_1 = psi_2 = I stay fixed.
struct PerSlotParamsEven {
    cmat U_w;    // M x (M/2)
    cmat phi_3;  // M x (M/2)
    cmat T_e;    // M x M
};

// Variables optimized on an odd slot. psi_3 = I_{M,1:M/2} stays fixed.
struct PerSlotParamsOdd {
    cmat U_b;           // M x (M/2)
    cmat phi_1, phi_2;  // (M/2) x (M/2)
    cmat T_o;           // M x (M/2)
};

// Hand-off an even-slot builder needs from the previous odd slot.
struct EvenSlotInput {
    cmat T_o;   // precoder of the data relay 3 is about to forward
    cmat W_3;   // receive factor relay 3 captured that data with
};

// Hand-off an odd-slot builder needs from the previous even slot.
struct OddSlotInput {
    cmat T_e;        // precoder of the data relays 1, 2 are about to forward
    cmat W_1, W_2;   // receive factors used during that capture
};

// State of the decentralized design for channels constant over slot pairs.
// W_3 tracks conj(B_3) from two slots earlier; Ubar_i are orthonormal bases
// orthogonal to H_i3 B_3 of the current pair.
struct DistributedState {
    cmat B_3, W_3;          // M x (M/2)
    cmat Ubar_1, Ubar_2;    // M x (M/2), orthonormal
    cmat xi_1, xi_2, xi_3;  // (M/2) x (M/2)
};

// The fixed unoptimized parameter point: identity-based precoders and bases.
//   T_e = I, T_o = U_b = U_w = first M/2 identity columns, G_1 = G_2 = I.
// G_3 selects the complementary block, G_3 = diag(0, I_{M/2}), so that the
// projector sandwich U_w^perp G_3 U_b^perp keeps rank M/2.
SlowFadingParams naive_params(int M);

// Per-slot counterparts of the fixed parameter point, with complementary
// selectors so that every derived factor keeps rank M/2. psi_3 is pinned to
// the first M/2 identity columns, which forces the odd-slot default U_b onto
// the last M/2 columns (otherwise W_3 = U_b^perp psi_3 would vanish); the
// even-slot default puts U_w on the first half and phi_3 on the second.
PerSlotParamsEven naive_even_params(int M);
PerSlotParamsOdd naive_odd_params(int M);

// Builds the full filter bank of the static-channel design:
//   F_i = H_3i^{-1} U_b G_i U_w^H H_i3^{-1} (i = 1, 2),
//   F_3 = U_w^perp G_3 U_b^perp,
// then fills the power-normalization state. The bank cancels inter-relay
// interference identically in the channel realization.
FilterBank build_slow(const SlowFadingParams& params, const ChannelSet& ch,
                      const NodeConfig& cfg);

// Even-slot partial build. F_3 forwards through the given W_3; the returned
// W_1, W_2 = H_i3^{-H} U_w are handed to the next odd slot.
struct EvenSlotBuild {
    cmat F_3;        // B_3 W_3^H
    cmat B_3;        // U_w^perp phi_3
    cmat T_e;
    cmat W_1, W_2;
};
EvenSlotBuild build_even(const PerSlotParamsEven& params, const ChannelSet& ch,
                         const EvenSlotInput& prev);

// Odd-slot partial build. F_i forward through the given W_i; the returned
// W_3 = U_b^perp psi_3 (psi_3 = first M/2 identity columns) is handed to the
// next even slot.
struct OddSlotBuild {
    cmat F_1, F_2;   // B_i W_i^H
    cmat B_1, B_2;   // H_3i^{-1} U_b phi_i
    cmat T_o;
    cmat W_3;
};
OddSlotBuild build_odd(const PerSlotParamsOdd& params, const ChannelSet& ch,
                       const OddSlotInput& prev);

// Decentralized build for one reciprocal slot pair. Relays 1 and 2 use
// F_i = conj(Ubar_i) xi_i Ubar_i^H with Ubar_i orthogonal to H_i3 B_3, so
// both interference directions cancel without any channel exchange between
// relays; relay 3 uses F_3 = B_3 W_3^H and will listen with conj(B_3) on the
// next pair. The parity names the slot being served; the build is total.
struct DistributedBuild {
    cmat F_1, F_2, F_3;
    cmat Ubar_1, Ubar_2;
    cmat W_3_next;   // conj(B_3)
};
DistributedBuild build_distributed(const DistributedState& state,
                                   const ChannelSet& ch, DeliveryParity parity);

// Scale-free leakage of transmit factors B_i into a receive factor W:
//   max_i ||W^H H_i B_i|| / (||W|| ||H_i|| ||B_i||).
// This is the per-slot cancellation check for sequenced (per-slot or
// per-pair) operation, where the three amplifiers in flight belong to
// different coherence blocks and a single-bank residual is not meaningful.
double rx_leak_residual(const cmat& W, const std::vector<cmat>& H,
                        const std::vector<cmat>& B);

} // namespace altrelay
