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
// Closed-form conjugate (Wirtinger) gradients of every design objective,
// plus the finite-difference oracle that validates them.
//
// Convention: for a real objective f of a complex matrix Z, grad = df/dZ^*
// satisfies f(Z + t D) - f(Z) ~ 2 t Re tr{grad^H D}. The test for
// f = ||Z||_F^2 (grad = Z) pins this normalization.
//
// All rate objectives are reported in bits; gradients carry the matching
// 1/(2 ln 2) factor so ascent steps and objectives stay consistent.

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "altrelay/alignment.hpp"
#include "altrelay/channel.hpp"
#include "altrelay/linalg.hpp"
#include "altrelay/system.hpp"

namespace altrelay {

using GradientSet = std::map<std::string, cmat>;
using ScalarObjective = std::function<double(const cmat&)>;

// ---------------------------------------------------------------------------
// Kernels. Both rate families reduce to two differentiable templates.
// ---------------------------------------------------------------------------

// One relay branch of a delivered-signal chain
//   H_z = sum_i sqrt(p_i) H_f[i] X[i] Hbar[i],
// where Hbar[i] already contains the source precoder, Sigma_rx[i] is the
// covariance of the branch input used for power normalization
// p_i = P_R / tr{X_i Sigma_i X_i^H}, and sigma2 is the branch noise variance
// that is amplified toward the destination.
struct ChainTerm {
    cmat H_f;
    cmat X;
    cmat Hbar;
    cmat Sigma_rx;
    double sigma2 = 1.0;
};

// Evaluation of the chain rate J = ln det(I + p_t H_z^H Sigma_z^{-1} H_z)
// together with the conjugate-gradient factors with respect to each X_i.
// The dX_i^H coefficient of dJ is p_t Psi[i]:
//   Omega_i = H_f^H Sigma_z^{-1} H_z E_z (Hbar_i^H
//             - sigma_i^2 sqrt(p_i) H_z^H Sigma_z^{-1} H_f X_i)
//   Psi_i   = sqrt(p_i) (Omega_i - (p_i/P_R) Re tr{X_i^H Omega_i} X_i Sigma_i)
// A branch whose amplifier transmits zero power is dropped: its p_i and
// Psi_i are zero.
struct ChainEval {
    double p_t = 0.0;
    std::vector<double> p;
    cmat H_z, Sigma_z, E_z;
    double J_nats = 0.0;
    std::vector<cmat> Psi;
    std::vector<cmat> Omega;
};

ChainEval eval_chain(const std::vector<ChainTerm>& terms, double p_t,
                     double P_R, double sigma_dest2);

// Gradient of the same chain rate with respect to the source precoder T,
// where Hbar[i] = H_b[i] * T and Sigma_rx[i] = p_t H_b[i] T T^H H_b[i]^H
// + sigma_i^2 I are all driven by the one T (static-channel case). Includes
// the couplings through p_t = P_S / tr{T T^H} and through every p_i.
cmat chain_grad_T(const std::vector<ChainTerm>& terms,
                  const std::vector<cmat>& H_b_raw, const cmat& T,
                  const ChainEval& ev, double P_S, double P_R);

// Projected-reception rate template
//   J = ln det(I + p_t sum_i (1/sigma_i^2) Y^H H_b[i]^H P_i H_b[i] Y),
// with P_i the orthogonal projector onto the columns of X_i and
// p_t = P_S / tr{Y Y^H}. Used for the same-slot rate bounds where a relay
// has captured the signal through the subspace of its receive factor.
struct ProjTerm {
    cmat H_b;
    cmat X;
    double sigma2 = 1.0;
};

struct ProjEval {
    double p_t = 0.0;
    cmat E_z;
    double J_nats = 0.0;
    // dX_i^H coefficient: A_i = (p_t/sigma_i^2) X_i^perp Upsilon_i X_i^dag,
    // with Upsilon_i = H_b Y E_z Y^H H_b^H.
    std::vector<cmat> A;
    std::vector<cmat> Upsilon;
    // dY^H coefficient, including the p_t trace coupling.
    cmat grad_Y;
};

ProjEval eval_projected(const std::vector<ProjTerm>& terms, const cmat& Y,
                        double P_S);

// ---------------------------------------------------------------------------
// Objectives and their gradients.
// ---------------------------------------------------------------------------

// Static channel, joint objective over all seven variables:
//   f1 = 1/2 (I_o + I_e) in bits, evaluated through the filter-bank route.
double eval_f1(const SlowFadingParams& params, const ChannelSet& ch,
               const NodeConfig& cfg);

// Conjugate gradients of f1 for {U_b, U_w, G_1, G_2, G_3, T_e, T_o}.
GradientSet grad_f1(const SlowFadingParams& params, const ChannelSet& ch,
                    const NodeConfig& cfg);

// Per-slot fading, even slot: f2 = 1/2 (I_o + I_c). I_o is the delivery of
// the previous odd-slot data through relay 3; I_c is the compound rate of
// the signal relays 1, 2 capture this slot through the subspaces of their
// receive factors W_i = H_i3^{-H} U_w. The hand-off carries the channel the
// forwarded data was received over.
struct EvenSlotContext {
    EvenSlotInput prev;   // T_o and W_3 fixed on the previous odd slot
    cmat H_3S_prev;       // backward channel of that previous slot
};

double eval_f2(const PerSlotParamsEven& params, const ChannelSet& ch,
               const EvenSlotContext& ctx, const NodeConfig& cfg);
GradientSet grad_f2(const PerSlotParamsEven& params, const ChannelSet& ch,
                    const EvenSlotContext& ctx, const NodeConfig& cfg);

// Per-slot fading, odd slot: f3 = 1/2 (I_e + I_p). I_e delivers the previous
// even-slot data through relays 1, 2; I_p is the rate of the signal relay 3
// captures this slot through W_3 = U_b^perp psi_3.
struct OddSlotContext {
    OddSlotInput prev;          // T_e, W_1, W_2 fixed on the previous even slot
    cmat H_1S_prev, H_2S_prev;  // backward channels of that previous slot
};

double eval_f3(const PerSlotParamsOdd& params, const ChannelSet& ch,
               const OddSlotContext& ctx, const NodeConfig& cfg);
GradientSet grad_f3(const PerSlotParamsOdd& params, const ChannelSet& ch,
                    const OddSlotContext& ctx, const NodeConfig& cfg);

// Decentralized design, even slot, objective over B_3 alone:
//   f4 = 1/2 (I_o + I_p).
// I_o delivers through F_3 = B_3 W_3^H; I_p is next pair's capture at relay
// 3 through the upcoming receive factor conj(B_3) over the next backward
// channel H_3S_next.
struct DistributedEvenContext {
    cmat W_3;        // receive factor fixed two slots ago
    cmat T_o;        // precoder of the data being forwarded
    cmat H_3S_prev;  // backward channel that data arrived over
    cmat H_D3;       // forward channel of the current slot
    cmat H_3S_next;  // backward channel of the upcoming capture
    cmat T_o_next;   // precoder of the upcoming odd slot
};

double eval_f4(const cmat& B_3, const DistributedEvenContext& ctx,
               const NodeConfig& cfg);
cmat grad_f4(const cmat& B_3, const DistributedEvenContext& ctx,
             const NodeConfig& cfg);

// Everything relay i (= 1 or 2) may see in the decentralized design: only
// its own links and noise level. Case II optimizers accept exactly this
// view, which is what enforces the locality contract.
struct RelayLocalView {
    cmat H_iS;       // backward channel of the slot the data arrived
    cmat H_Di;       // forward channel of the transmission slot
    cmat H_i3;       // link from relay 3, for the null-space basis
    double sigma2 = 1.0;
    cmat T_e;        // source precoder (protocol constant)
};

// Single-relay rate f_ei = 1/2 log2 det E_ei^{-1} through
// F_i = conj(Ubar_i) xi_i Ubar_i^H, and its conjugate gradient in xi_i:
//   grad = (p_e / (2 ln 2)) Ubar_i^T Psi_ei Ubar_i.
double eval_fei(const cmat& xi_i, const cmat& Ubar_i,
                const RelayLocalView& view, const NodeConfig& cfg);
cmat grad_fei(const cmat& xi_i, const cmat& Ubar_i,
              const RelayLocalView& view, const NodeConfig& cfg);

// Central-difference estimate of df/dZ^* under the convention above:
//   grad_kl = 1/2 df/dRe(Z_kl) + i/2 df/dIm(Z_kl).
// step <= 0 selects the default 1e-5 (1 + ||Z||_F / size(Z)).
cmat fd_gradient(const ScalarObjective& f, const cmat& Z, double step = 0.0);

// ---------------------------------------------------------------------------
// Self-check sweep.
// ---------------------------------------------------------------------------

struct GradientCheckSpec {
    int M = 4;
    double snr_db = 10.0;  // equal source and relay power, unit noise
    std::uint64_t seed = 1;
    int points = 20;
};

// Compares every analytic gradient against fd_gradient at `points` random
// parameter draws, all at the same size and power level. Returns the worst
// relative Frobenius deviation per component, keyed "f1.U_b" ... "fei.xi"
// for the design objectives (bits) and "chain.X", "chain.T", "proj.Y" for
// the underlying kernels (nats). Draws that hit a conditioning guard are
// replaced deterministically.
std::map<std::string, double> gradient_check(const GradientCheckSpec& spec);

} // namespace altrelay
