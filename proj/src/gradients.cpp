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

#include "altrelay/gradients.hpp"

#include <cmath>

namespace altrelay {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kZeroTrace = 1e-300;

// Power scale of a precoder, with transmit-nothing mapped to zero instead of
// an exception so the objective templates stay total functions.
double safe_source_factor(const cmat& T, double P_S)
{
    const double t = T.squaredNorm();
    return t > kZeroTrace ? P_S / t : 0.0;
}

cmat hermitize(const cmat& A)
{
    return 0.5 * (A + A.adjoint());
}

// Branches of the delivered-data chain for the even-indexed slots: relays 1
// and 2 forward through F_1, F_2 the data that arrived over Hb1, Hb2.
std::vector<ChainTerm> even_delivery_terms(const cmat& F_1, const cmat& F_2,
                                           const cmat& T_e, const cmat& Hb1,
                                           const cmat& Hb2, const cmat& HD1,
                                           const cmat& HD2, double p_e,
                                           const NodeConfig& cfg)
{
    std::vector<ChainTerm> terms(2);
    const cmat* F[2] = {&F_1, &F_2};
    const cmat* Hb[2] = {&Hb1, &Hb2};
    const cmat* Hf[2] = {&HD1, &HD2};
    for (int i = 0; i < 2; ++i) {
        terms[i].H_f = *Hf[i];
        terms[i].X = *F[i];
        terms[i].Hbar = *Hb[i] * T_e;
        terms[i].Sigma_rx = hermitize(p_e * terms[i].Hbar * terms[i].Hbar.adjoint()) +
                            cfg.sigma_relay[i] * cfg.sigma_relay[i] *
                                cmat::Identity(cfg.M, cfg.M);
        terms[i].sigma2 = cfg.sigma_relay[i] * cfg.sigma_relay[i];
    }
    return terms;
}

// The single branch of the odd-indexed delivery: relay 3 forwards through
// F_3 the data that arrived over Hb3.
std::vector<ChainTerm> odd_delivery_terms(const cmat& F_3, const cmat& T_o,
                                          const cmat& Hb3, const cmat& HD3,
                                          double p_o, const NodeConfig& cfg)
{
    std::vector<ChainTerm> terms(1);
    terms[0].H_f = HD3;
    terms[0].X = F_3;
    terms[0].Hbar = Hb3 * T_o;
    terms[0].Sigma_rx = hermitize(p_o * terms[0].Hbar * terms[0].Hbar.adjoint()) +
                        cfg.sigma_relay[2] * cfg.sigma_relay[2] *
                            cmat::Identity(cfg.M, cfg.M);
    terms[0].sigma2 = cfg.sigma_relay[2] * cfg.sigma_relay[2];
    return terms;
}

} // namespace

// ---------------------------------------------------------------------------
// Chain kernel
// ---------------------------------------------------------------------------

ChainEval eval_chain(const std::vector<ChainTerm>& terms, double p_t,
                     double P_R, double sigma_dest2)
{
    if (terms.empty())
        throw InvalidDimension("eval_chain: at least one branch is required");

    const Eigen::Index M = terms[0].H_f.rows();
    const Eigen::Index d = terms[0].Hbar.cols();

    ChainEval ev;
    ev.p_t = p_t;
    ev.p.assign(terms.size(), 0.0);
    ev.H_z = cmat::Zero(M, d);
    ev.Sigma_z = sigma_dest2 * cmat::Identity(M, M);

    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        const double tx = std::real((t.X * t.Sigma_rx * t.X.adjoint()).trace());
        if (!(tx > kZeroTrace))
            continue;
        ev.p[i] = P_R / tx;
        const cmat FX = t.H_f * t.X;
        ev.H_z += std::sqrt(ev.p[i]) * FX * t.Hbar;
        ev.Sigma_z += (t.sigma2 * ev.p[i]) * (FX * FX.adjoint());
    }
    ev.Sigma_z = hermitize(ev.Sigma_z);

    const cmat Sz_inv = hermitian_pd_inverse(ev.Sigma_z);
    // The whitened Gram matrix below is positive semidefinite but can be rank
    // deficient (fewer active branches than streams), so I + Gram is factored
    // through its eigenvalues; see identity_plus_psd.
    const auto ip =
        identity_plus_psd(hermitize(p_t * ev.H_z.adjoint() * Sz_inv * ev.H_z));
    ev.J_nats = ip.logdet;
    ev.E_z = ip.inverse;

    // dX_i^H coefficient of the rate differential, see the header.
    const cmat K = Sz_inv * ev.H_z * ev.E_z;
    ev.Psi.resize(terms.size());
    ev.Omega.resize(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (ev.p[i] == 0.0) {
            ev.Omega[i] = cmat::Zero(t.X.rows(), t.X.cols());
            ev.Psi[i] = ev.Omega[i];
            continue;
        }
        const double rp = std::sqrt(ev.p[i]);
        ev.Omega[i] = t.H_f.adjoint() * K *
                      (t.Hbar.adjoint() -
                       (t.sigma2 * rp) * ev.H_z.adjoint() * Sz_inv * t.H_f * t.X);
        const double c = std::real((t.X.adjoint() * ev.Omega[i]).trace());
        ev.Psi[i] = rp * (ev.Omega[i] - (ev.p[i] / P_R) * c * t.X * t.Sigma_rx);
    }
    return ev;
}

cmat chain_grad_T(const std::vector<ChainTerm>& terms,
                  const std::vector<cmat>& H_b_raw, const cmat& T,
                  const ChainEval& ev, double P_S, double P_R)
{
    if (H_b_raw.size() != terms.size())
        throw InvalidDimension("chain_grad_T: one backward channel per branch");

    const cmat Sz_inv = hermitian_pd_inverse(ev.Sigma_z);
    const cmat K = Sz_inv * ev.H_z * ev.E_z;

    // Coupling through the source power scale p_t = P_S / tr{T T^H}.
    const double tr_rate = std::real((ev.H_z.adjoint() * K).trace());
    cmat g = -(ev.p_t * ev.p_t / P_S) * tr_rate * T;

    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (ev.p[i] == 0.0)
            continue;
        const auto& t = terms[i];
        const double rp = std::sqrt(ev.p[i]);

        // Direct path of T inside H_z.
        g += (ev.p_t * rp) * H_b_raw[i].adjoint() * t.X.adjoint() *
             t.H_f.adjoint() * K;

        // Coupling through p_i: the relay re-normalizes against the input
        // covariance p_t H_b T T^H H_b^H + sigma^2 I, which moves with T both
        // directly and through p_t.
        const double c = std::real((t.X.adjoint() * ev.Omega[i]).trace());
        const cmat Phi = H_b_raw[i].adjoint() * t.X.adjoint() * t.X * H_b_raw[i];
        const double tPhi = std::real((T.adjoint() * Phi * T).trace());
        g -= (ev.p_t * ev.p_t * ev.p[i] * rp / P_R) * c *
             (Phi * T - (ev.p_t / P_S) * tPhi * T);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Projected-reception kernel
// ---------------------------------------------------------------------------

ProjEval eval_projected(const std::vector<ProjTerm>& terms, const cmat& Y,
                        double P_S)
{
    if (terms.empty())
        throw InvalidDimension("eval_projected: at least one branch is required");

    const Eigen::Index d = Y.cols();
    ProjEval ev;
    ev.A.resize(terms.size());
    ev.Upsilon.resize(terms.size());

    const double ty = Y.squaredNorm();
    if (!(ty > kZeroTrace)) {
        ev.p_t = 0.0;
        ev.E_z = cmat::Identity(d, d);
        ev.J_nats = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            ev.A[i] = cmat::Zero(terms[i].X.rows(), terms[i].X.cols());
            ev.Upsilon[i] = cmat::Zero(terms[i].H_b.rows(), terms[i].H_b.rows());
        }
        ev.grad_Y = cmat::Zero(Y.rows(), Y.cols());
        return ev;
    }
    ev.p_t = P_S / ty;

    std::vector<cmat> P(terms.size());
    cmat S = cmat::Zero(d, d);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (!(t.X.squaredNorm() > kZeroTrace)) {
            P[i] = cmat::Zero(t.X.rows(), t.X.rows());
            continue;
        }
        P[i] = semi_inverse(t.X) * t.X.adjoint();
        S += (ev.p_t / t.sigma2) * Y.adjoint() * t.H_b.adjoint() * P[i] *
             t.H_b * Y;
    }
    const auto ip = identity_plus_psd(hermitize(S));
    ev.J_nats = ip.logdet;
    ev.E_z = ip.inverse;

    ev.grad_Y = cmat::Zero(Y.rows(), Y.cols());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        ev.Upsilon[i] = t.H_b * Y * ev.E_z * Y.adjoint() * t.H_b.adjoint();
        if (!(t.X.squaredNorm() > kZeroTrace)) {
            ev.A[i] = cmat::Zero(t.X.rows(), t.X.cols());
            continue;
        }
        ev.A[i] = (ev.p_t / t.sigma2) * orth_complement_projector(t.X) *
                  ev.Upsilon[i] * semi_inverse(t.X);
        const double tUP = std::real((ev.Upsilon[i] * P[i]).trace());
        ev.grad_Y += (ev.p_t / t.sigma2) *
                     (t.H_b.adjoint() * P[i] * t.H_b * Y * ev.E_z -
                      (ev.p_t / P_S) * tUP * Y);
    }
    return ev;
}

// ---------------------------------------------------------------------------
// Static-channel joint objective
// ---------------------------------------------------------------------------

double eval_f1(const SlowFadingParams& params, const ChannelSet& ch,
               const NodeConfig& cfg)
{
    // Deliberately routed through the filter-bank path: the value and the
    // closed-form gradient below share no intermediate code, which keeps the
    // finite-difference comparison an independent check.
    const FilterBank bank = build_slow(params, ch, cfg);
    return two_slot_rate(bank, ch, cfg);
}

GradientSet grad_f1(const SlowFadingParams& params, const ChannelSet& ch,
                    const NodeConfig& cfg)
{
    const cmat H31_inv = inverse_checked(ch.H_31, "grad_f1: H_31");
    const cmat H32_inv = inverse_checked(ch.H_32, "grad_f1: H_32");
    const cmat H13_inv = inverse_checked(ch.H_13, "grad_f1: H_13");
    const cmat H23_inv = inverse_checked(ch.H_23, "grad_f1: H_23");

    const cmat F_1 = H31_inv * params.U_b * params.G_1 * params.U_w.adjoint() * H13_inv;
    const cmat F_2 = H32_inv * params.U_b * params.G_2 * params.U_w.adjoint() * H23_inv;
    const cmat P_b = orth_complement_projector(params.U_b);
    const cmat P_w = orth_complement_projector(params.U_w);
    const cmat F_3 = P_w * params.G_3 * P_b;

    const double p_e = safe_source_factor(params.T_e, cfg.P_S);
    const double p_o = safe_source_factor(params.T_o, cfg.P_S);

    const auto even = even_delivery_terms(F_1, F_2, params.T_e, ch.H_1S,
                                          ch.H_2S, ch.H_D1, ch.H_D2, p_e, cfg);
    const auto odd = odd_delivery_terms(F_3, params.T_o, ch.H_3S, ch.H_D3,
                                        p_o, cfg);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval ee = eval_chain(even, p_e, cfg.P_R, sD2);
    const ChainEval eo = eval_chain(odd, p_o, cfg.P_R, sD2);

    const double s = 1.0 / (2.0 * kLn2);
    const cmat Ub_dag = semi_inverse(params.U_b);
    const cmat Uw_dag = semi_inverse(params.U_w);
    const cmat* Hfb_inv[2] = {&H31_inv, &H32_inv}; // H_3i^{-1}
    const cmat* Hbf_inv[2] = {&H13_inv, &H23_inv}; // H_i3^{-1}
    const cmat* G[2] = {&params.G_1, &params.G_2};

    GradientSet grads;
    const Eigen::Index h = cfg.M / 2;
    cmat gUb = cmat::Zero(cfg.M, h);
    cmat gUw = cmat::Zero(cfg.M, h);

    // Even-side terms: F_i = H_3i^{-1} U_b G_i U_w^H H_i3^{-1}.
    for (int i = 0; i < 2; ++i) {
        const cmat Li = Hfb_inv[i]->adjoint() * (p_e * ee.Psi[i]) *
                        Hbf_inv[i]->adjoint();
        gUb += Li * params.U_w * G[i]->adjoint();
        gUw += Li.adjoint() * params.U_b * *G[i];
        grads["G_" + std::to_string(i + 1)] =
            s * (params.U_b.adjoint() * Li * params.U_w);
    }

    // Odd-side terms: F_3 = U_w_perp G_3 U_b_perp, with the projector
    // differential dZ_perp = -Z_perp dZ Z_dag^H - Z_dag dZ^H Z_perp.
    const cmat Po3 = p_o * eo.Psi[0];
    gUb -= P_b * (params.G_3.adjoint() * P_w * Po3 +
                  Po3.adjoint() * P_w * params.G_3) * Ub_dag;
    gUw -= P_w * (Po3 * P_b * params.G_3.adjoint() +
                  params.G_3 * P_b * Po3.adjoint()) * Uw_dag;
    grads["G_3"] = s * (P_w * Po3 * P_b);

    grads["U_b"] = s * gUb;
    grads["U_w"] = s * gUw;
    grads["T_e"] = s * chain_grad_T(even, {ch.H_1S, ch.H_2S}, params.T_e, ee,
                                    cfg.P_S, cfg.P_R);
    grads["T_o"] = s * chain_grad_T(odd, {ch.H_3S}, params.T_o, eo,
                                    cfg.P_S, cfg.P_R);
    return grads;
}

// ---------------------------------------------------------------------------
// Per-slot objective, even slots
// ---------------------------------------------------------------------------

namespace {

// Pieces shared by the value and the gradient of f2.
struct F2Pieces {
    cmat W_1, W_2;
    std::vector<ChainTerm> odd;
    std::vector<ProjTerm> cap;
    double p_o = 0.0;
};

F2Pieces f2_pieces(const PerSlotParamsEven& params, const ChannelSet& ch,
                   const EvenSlotContext& ctx, const NodeConfig& cfg)
{
    F2Pieces pc;
    const cmat H13_inv = inverse_checked(ch.H_13, "f2: H_13");
    const cmat H23_inv = inverse_checked(ch.H_23, "f2: H_23");
    pc.W_1 = H13_inv.adjoint() * params.U_w;
    pc.W_2 = H23_inv.adjoint() * params.U_w;

    const cmat P_w = orth_complement_projector(params.U_w);
    const cmat F_3 = P_w * params.phi_3 * ctx.prev.W_3.adjoint();
    pc.p_o = safe_source_factor(ctx.prev.T_o, cfg.P_S);
    pc.odd = odd_delivery_terms(F_3, ctx.prev.T_o, ctx.H_3S_prev, ch.H_D3,
                                pc.p_o, cfg);

    pc.cap.resize(2);
    pc.cap[0] = {ch.H_1S, pc.W_1, cfg.sigma_relay[0] * cfg.sigma_relay[0]};
    pc.cap[1] = {ch.H_2S, pc.W_2, cfg.sigma_relay[1] * cfg.sigma_relay[1]};
    return pc;
}

} // namespace

double eval_f2(const PerSlotParamsEven& params, const ChannelSet& ch,
               const EvenSlotContext& ctx, const NodeConfig& cfg)
{
    const F2Pieces pc = f2_pieces(params, ch, ctx, cfg);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval eo = eval_chain(pc.odd, pc.p_o, cfg.P_R, sD2);
    const ProjEval ec = eval_projected(pc.cap, params.T_e, cfg.P_S);
    return (eo.J_nats + ec.J_nats) / (2.0 * kLn2);
}

GradientSet grad_f2(const PerSlotParamsEven& params, const ChannelSet& ch,
                    const EvenSlotContext& ctx, const NodeConfig& cfg)
{
    const F2Pieces pc = f2_pieces(params, ch, ctx, cfg);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval eo = eval_chain(pc.odd, pc.p_o, cfg.P_R, sD2);
    const ProjEval ec = eval_projected(pc.cap, params.T_e, cfg.P_S);

    const double s = 1.0 / (2.0 * kLn2);
    const cmat P_w = orth_complement_projector(params.U_w);
    const cmat Uw_dag = semi_inverse(params.U_w);
    const cmat H13_inv = inverse_checked(ch.H_13, "grad_f2: H_13");
    const cmat H23_inv = inverse_checked(ch.H_23, "grad_f2: H_23");

    // Capture side reaches U_w through W_i = H_i3^{-H} U_w.
    cmat gUw = H13_inv * ec.A[0] + H23_inv * ec.A[1];

    // Delivery side reaches U_w through the projector in F_3.
    const cmat Po3 = pc.p_o * eo.Psi[0];
    gUw -= P_w * (Po3 * ctx.prev.W_3 * params.phi_3.adjoint() +
                  params.phi_3 * ctx.prev.W_3.adjoint() * Po3.adjoint()) * Uw_dag;

    GradientSet grads;
    grads["U_w"] = s * gUw;
    grads["phi_3"] = s * (P_w * Po3 * ctx.prev.W_3);
    grads["T_e"] = s * ec.grad_Y;
    return grads;
}

// ---------------------------------------------------------------------------
// Per-slot objective, odd slots
// ---------------------------------------------------------------------------

namespace {

struct F3Pieces {
    cmat W_3;
    std::vector<ChainTerm> even;
    std::vector<ProjTerm> cap;
    double p_e = 0.0;
};

F3Pieces f3_pieces(const PerSlotParamsOdd& params, const ChannelSet& ch,
                   const OddSlotContext& ctx, const NodeConfig& cfg)
{
    F3Pieces pc;
    const cmat H31_inv = inverse_checked(ch.H_31, "f3: H_31");
    const cmat H32_inv = inverse_checked(ch.H_32, "f3: H_32");
    const cmat P_b = orth_complement_projector(params.U_b);
    pc.W_3 = P_b.leftCols(cfg.M / 2);

    const cmat F_1 = H31_inv * params.U_b * params.phi_1 * ctx.prev.W_1.adjoint();
    const cmat F_2 = H32_inv * params.U_b * params.phi_2 * ctx.prev.W_2.adjoint();
    pc.p_e = safe_source_factor(ctx.prev.T_e, cfg.P_S);
    pc.even = even_delivery_terms(F_1, F_2, ctx.prev.T_e, ctx.H_1S_prev,
                                  ctx.H_2S_prev, ch.H_D1, ch.H_D2, pc.p_e, cfg);

    pc.cap.resize(1);
    pc.cap[0] = {ch.H_3S, pc.W_3, cfg.sigma_relay[2] * cfg.sigma_relay[2]};
    return pc;
}

} // namespace

double eval_f3(const PerSlotParamsOdd& params, const ChannelSet& ch,
               const OddSlotContext& ctx, const NodeConfig& cfg)
{
    const F3Pieces pc = f3_pieces(params, ch, ctx, cfg);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval ee = eval_chain(pc.even, pc.p_e, cfg.P_R, sD2);
    const ProjEval ep = eval_projected(pc.cap, params.T_o, cfg.P_S);
    return (ee.J_nats + ep.J_nats) / (2.0 * kLn2);
}

GradientSet grad_f3(const PerSlotParamsOdd& params, const ChannelSet& ch,
                    const OddSlotContext& ctx, const NodeConfig& cfg)
{
    const F3Pieces pc = f3_pieces(params, ch, ctx, cfg);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval ee = eval_chain(pc.even, pc.p_e, cfg.P_R, sD2);
    const ProjEval ep = eval_projected(pc.cap, params.T_o, cfg.P_S);

    const double s = 1.0 / (2.0 * kLn2);
    const Eigen::Index h = cfg.M / 2;
    const cmat P_b = orth_complement_projector(params.U_b);
    const cmat Ub_dag = semi_inverse(params.U_b);
    const cmat H31_inv = inverse_checked(ch.H_31, "grad_f3: H_31");
    const cmat H32_inv = inverse_checked(ch.H_32, "grad_f3: H_32");
    const cmat psi_3 = cmat::Identity(cfg.M, cfg.M).leftCols(h);

    const cmat* Hfb_inv[2] = {&H31_inv, &H32_inv};
    const cmat* phi[2] = {&params.phi_1, &params.phi_2};
    const cmat* Wprev[2] = {&ctx.prev.W_1, &ctx.prev.W_2};

    GradientSet grads;
    cmat gUb = cmat::Zero(cfg.M, h);
    for (int i = 0; i < 2; ++i) {
        const cmat Li = Hfb_inv[i]->adjoint() * (pc.p_e * ee.Psi[i]);
        gUb += Li * *Wprev[i] * phi[i]->adjoint();
        grads["phi_" + std::to_string(i + 1)] =
            s * (params.U_b.adjoint() * Li * *Wprev[i]);
    }

    // Capture side reaches U_b through W_3 = U_b_perp psi_3.
    gUb -= P_b * (ep.A[0] * psi_3.adjoint() + psi_3 * ep.A[0].adjoint()) * Ub_dag;

    grads["U_b"] = s * gUb;
    grads["T_o"] = s * ep.grad_Y;
    return grads;
}

// ---------------------------------------------------------------------------
// Decentralized objective at relay 3
// ---------------------------------------------------------------------------

double eval_f4(const cmat& B_3, const DistributedEvenContext& ctx,
               const NodeConfig& cfg)
{
    const double p_o = safe_source_factor(ctx.T_o, cfg.P_S);
    const cmat F_3 = B_3 * ctx.W_3.adjoint();
    const auto odd = odd_delivery_terms(F_3, ctx.T_o, ctx.H_3S_prev, ctx.H_D3,
                                        p_o, cfg);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval eo = eval_chain(odd, p_o, cfg.P_R, sD2);

    // Next pair's capture through the upcoming receive factor conj(B_3).
    std::vector<ProjTerm> cap(1);
    cap[0] = {ctx.H_3S_next, B_3.conjugate(),
              cfg.sigma_relay[2] * cfg.sigma_relay[2]};
    const ProjEval ep = eval_projected(cap, ctx.T_o_next, cfg.P_S);

    return (eo.J_nats + ep.J_nats) / (2.0 * kLn2);
}

cmat grad_f4(const cmat& B_3, const DistributedEvenContext& ctx,
             const NodeConfig& cfg)
{
    const double p_o = safe_source_factor(ctx.T_o, cfg.P_S);
    const cmat F_3 = B_3 * ctx.W_3.adjoint();
    const auto odd = odd_delivery_terms(F_3, ctx.T_o, ctx.H_3S_prev, ctx.H_D3,
                                        p_o, cfg);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval eo = eval_chain(odd, p_o, cfg.P_R, sD2);

    std::vector<ProjTerm> cap(1);
    cap[0] = {ctx.H_3S_next, B_3.conjugate(),
              cfg.sigma_relay[2] * cfg.sigma_relay[2]};
    const ProjEval ep = eval_projected(cap, ctx.T_o_next, cfg.P_S);

    // The capture's dX^H coefficient is taken in X = conj(B_3); conjugating
    // it back gives the dB_3^H coefficient.
    const double s = 1.0 / (2.0 * kLn2);
    return s * (p_o * eo.Psi[0] * ctx.W_3 + ep.A[0].conjugate());
}

// ---------------------------------------------------------------------------
// Decentralized objective at relays 1 and 2
// ---------------------------------------------------------------------------

namespace {

std::vector<ChainTerm> local_delivery_term(const cmat& xi_i, const cmat& Ubar_i,
                                           const RelayLocalView& view,
                                           const NodeConfig& cfg, double p_e)
{
    std::vector<ChainTerm> terms(1);
    terms[0].H_f = view.H_Di;
    terms[0].X = Ubar_i.conjugate() * xi_i * Ubar_i.adjoint();
    terms[0].Hbar = view.H_iS * view.T_e;
    terms[0].Sigma_rx = hermitize(p_e * terms[0].Hbar * terms[0].Hbar.adjoint()) +
                        view.sigma2 * cmat::Identity(cfg.M, cfg.M);
    terms[0].sigma2 = view.sigma2;
    return terms;
}

} // namespace

double eval_fei(const cmat& xi_i, const cmat& Ubar_i,
                const RelayLocalView& view, const NodeConfig& cfg)
{
    const double p_e = safe_source_factor(view.T_e, cfg.P_S);
    const auto terms = local_delivery_term(xi_i, Ubar_i, view, cfg, p_e);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval ev = eval_chain(terms, p_e, cfg.P_R, sD2);
    return ev.J_nats / (2.0 * kLn2);
}

cmat grad_fei(const cmat& xi_i, const cmat& Ubar_i,
              const RelayLocalView& view, const NodeConfig& cfg)
{
    const double p_e = safe_source_factor(view.T_e, cfg.P_S);
    const auto terms = local_delivery_term(xi_i, Ubar_i, view, cfg, p_e);
    const double sD2 = cfg.sigma_dest * cfg.sigma_dest;
    const ChainEval ev = eval_chain(terms, p_e, cfg.P_R, sD2);

    const double s = 1.0 / (2.0 * kLn2);
    return s * (p_e * Ubar_i.transpose() * ev.Psi[0] * Ubar_i);
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

cmat fd_gradient(const ScalarObjective& f, const cmat& Z, double step)
{
    const double h =
        step > 0.0 ? step : 1e-5 * (1.0 + Z.norm() / static_cast<double>(Z.size()));
    cmat G(Z.rows(), Z.cols());
    cmat Zp = Z;
    for (Eigen::Index c = 0; c < Z.cols(); ++c) {
        for (Eigen::Index r = 0; r < Z.rows(); ++r) {
            const cplx z0 = Z(r, c);
            Zp(r, c) = z0 + h;
            const double fpr = f(Zp);
            Zp(r, c) = z0 - h;
            const double fmr = f(Zp);
            Zp(r, c) = z0 + cplx(0.0, h);
            const double fpi = f(Zp);
            Zp(r, c) = z0 - cplx(0.0, h);
            const double fmi = f(Zp);
            Zp(r, c) = z0;
            G(r, c) = cplx((fpr - fmr) / (4.0 * h), (fpi - fmi) / (4.0 * h));
        }
    }
    return G;
}

// ---------------------------------------------------------------------------
// Self-check sweep
// ---------------------------------------------------------------------------

namespace {

// Relative Frobenius deviation with a floor at the precision of the
// finite-difference measurement itself. A central difference of the
// objective carries rounding noise of about kEvalError |J| / step per
// entry, where kEvalError is the relative accuracy of one objective
// evaluation (a chain of solves and eigendecompositions, so well above
// machine epsilon). Deviations at that level certify agreement rather
// than disagreement. The floor matters for directions the objective is
// exactly flat in (the rank-one amplifier factors at M = 2 are invariant
// to complex scaling): there the analytic gradient cancels to zero and
// the finite difference is pure noise.
double rel_dev(const cmat& analytic, const cmat& fd, double J_scale,
               const cmat& Z)
{
    constexpr double kEvalError = 1e-13;
    constexpr double kTolerance = 1e-5;
    const double step =
        1e-5 * (1.0 + Z.norm() / static_cast<double>(Z.size()));
    const double noise = kEvalError * (1.0 + std::abs(J_scale)) / step *
                         std::sqrt(static_cast<double>(Z.size()));
    const double den = std::max(fd.norm(), noise / kTolerance);
    return (analytic - fd).norm() / den;
}

} // namespace

std::map<std::string, double> gradient_check(const GradientCheckSpec& spec)
{
    const Eigen::Index M = spec.M;
    const Eigen::Index h = M / 2;
    NodeConfig node;
    node.M = static_cast<int>(M);
    node.P_S = node.P_R = std::pow(10.0, spec.snr_db / 10.0);
    node.sigma_relay[0] = node.sigma_relay[1] = node.sigma_relay[2] = 1.0;
    node.sigma_dest = 1.0;

    std::map<std::string, double> worst;
    const auto note = [&](const std::string& key, double e) {
        auto [it, fresh] = worst.emplace(key, e);
        if (!fresh)
            it->second = std::max(it->second, e);
    };

    int collected = 0;
    for (int attempt = 0; collected < spec.points && attempt < 4 * spec.points;
         ++attempt) {
        try {
            GaussianStream crng(spec.seed, static_cast<std::uint64_t>(attempt),
                                StreamPurpose::channels);
            GaussianStream prng(spec.seed, static_cast<std::uint64_t>(attempt),
                                StreamPurpose::init);
            const ChannelSet ch =
                draw_channel_sequence(FadingScenario::SlowFading,
                                      static_cast<int>(M), 1, crng)
                    .front();

            // Joint static-channel objective.
            SlowFadingParams sp;
            sp.U_b = prng.matrix(M, h);
            sp.U_w = prng.matrix(M, h);
            sp.G_1 = prng.matrix(h, h);
            sp.G_2 = prng.matrix(h, h);
            sp.G_3 = prng.matrix(M, M);
            sp.T_e = prng.matrix(M, M);
            sp.T_o = prng.matrix(M, h);
            {
                const GradientSet g = grad_f1(sp, ch, node);
                const double J = eval_f1(sp, ch, node);
                cmat SlowFadingParams::* fields[] = {
                    &SlowFadingParams::U_b, &SlowFadingParams::U_w,
                    &SlowFadingParams::G_1, &SlowFadingParams::G_2,
                    &SlowFadingParams::G_3, &SlowFadingParams::T_e,
                    &SlowFadingParams::T_o};
                const char* names[] = {"U_b", "U_w", "G_1", "G_2",
                                       "G_3", "T_e", "T_o"};
                for (int k = 0; k < 7; ++k) {
                    const auto fd = fd_gradient(
                        [&](const cmat& Z) {
                            SlowFadingParams p = sp;
                            p.*fields[k] = Z;
                            return eval_f1(p, ch, node);
                        },
                        sp.*fields[k]);
                    note(std::string("f1.") + names[k],
                         rel_dev(g.at(names[k]), fd, J, sp.*fields[k]));
                }
            }

            // Even-slot objective.
            PerSlotParamsEven pe;
            pe.U_w = prng.matrix(M, h);
            pe.phi_3 = prng.matrix(M, h);
            pe.T_e = prng.matrix(M, M);
            EvenSlotContext ectx;
            ectx.prev.T_o = prng.matrix(M, h);
            ectx.prev.W_3 = prng.matrix(M, h);
            ectx.H_3S_prev = prng.matrix(M, M);
            {
                const GradientSet g = grad_f2(pe, ch, ectx, node);
                const double J = eval_f2(pe, ch, ectx, node);
                cmat PerSlotParamsEven::* fields[] = {&PerSlotParamsEven::U_w,
                                                      &PerSlotParamsEven::phi_3,
                                                      &PerSlotParamsEven::T_e};
                const char* names[] = {"U_w", "phi_3", "T_e"};
                for (int k = 0; k < 3; ++k) {
                    const auto fd = fd_gradient(
                        [&](const cmat& Z) {
                            PerSlotParamsEven p = pe;
                            p.*fields[k] = Z;
                            return eval_f2(p, ch, ectx, node);
                        },
                        pe.*fields[k]);
                    note(std::string("f2.") + names[k],
                         rel_dev(g.at(names[k]), fd, J, pe.*fields[k]));
                }
            }

            // Odd-slot objective.
            PerSlotParamsOdd po;
            po.U_b = prng.matrix(M, h);
            po.phi_1 = prng.matrix(h, h);
            po.phi_2 = prng.matrix(h, h);
            po.T_o = prng.matrix(M, h);
            OddSlotContext octx;
            octx.prev.T_e = prng.matrix(M, M);
            octx.prev.W_1 = prng.matrix(M, h);
            octx.prev.W_2 = prng.matrix(M, h);
            octx.H_1S_prev = prng.matrix(M, M);
            octx.H_2S_prev = prng.matrix(M, M);
            {
                const GradientSet g = grad_f3(po, ch, octx, node);
                const double J = eval_f3(po, ch, octx, node);
                cmat PerSlotParamsOdd::* fields[] = {
                    &PerSlotParamsOdd::U_b, &PerSlotParamsOdd::phi_1,
                    &PerSlotParamsOdd::phi_2, &PerSlotParamsOdd::T_o};
                const char* names[] = {"U_b", "phi_1", "phi_2", "T_o"};
                for (int k = 0; k < 4; ++k) {
                    const auto fd = fd_gradient(
                        [&](const cmat& Z) {
                            PerSlotParamsOdd p = po;
                            p.*fields[k] = Z;
                            return eval_f3(p, ch, octx, node);
                        },
                        po.*fields[k]);
                    note(std::string("f3.") + names[k],
                         rel_dev(g.at(names[k]), fd, J, po.*fields[k]));
                }
            }

            // Decentralized even-slot objective in B_3.
            DistributedEvenContext dctx;
            dctx.W_3 = prng.matrix(M, h);
            dctx.T_o = prng.matrix(M, h);
            dctx.H_3S_prev = prng.matrix(M, M);
            dctx.H_D3 = ch.H_D3;
            dctx.H_3S_next = prng.matrix(M, M);
            dctx.T_o_next = prng.matrix(M, h);
            const cmat B3 = prng.matrix(M, h);
            note("f4.B_3",
                 rel_dev(grad_f4(B3, dctx, node),
                         fd_gradient(
                             [&](const cmat& Z) {
                                 return eval_f4(Z, dctx, node);
                             },
                             B3),
                         eval_f4(B3, dctx, node), B3));

            // Local relay objective in xi.
            RelayLocalView view;
            view.H_iS = ch.H_1S;
            view.H_Di = ch.H_D1;
            view.H_i3 = ch.H_13;
            view.sigma2 = 1.0;
            view.T_e = prng.matrix(M, M);
            const cmat Ubar =
                orthonormal_null_basis(ch.H_13 * prng.matrix(M, h), h);
            const cmat xi = prng.matrix(h, h);
            note("fei.xi",
                 rel_dev(grad_fei(xi, Ubar, view, node),
                         fd_gradient(
                             [&](const cmat& Z) {
                                 return eval_fei(Z, Ubar, view, node);
                             },
                             xi),
                         eval_fei(xi, Ubar, view, node), xi));

            // Delivery-chain kernel, in nats.
            std::vector<ChainTerm> terms(2);
            std::vector<cmat> H_b(2);
            const cmat T = prng.matrix(M, M);
            const double p_t = node.P_S / T.squaredNorm();
            for (int i = 0; i < 2; ++i) {
                terms[i].H_f = prng.matrix(M, M);
                terms[i].X = prng.matrix(M, M);
                H_b[i] = prng.matrix(M, M);
                terms[i].Hbar = H_b[i] * T;
                terms[i].Sigma_rx =
                    p_t * (H_b[i] * T) * (H_b[i] * T).adjoint() +
                    cmat::Identity(M, M);
                terms[i].sigma2 = 1.0;
            }
            {
                const ChainEval ev =
                    eval_chain(terms, p_t, node.P_R, node.sigma_dest);
                const auto fd = fd_gradient(
                    [&](const cmat& Z) {
                        std::vector<ChainTerm> t2 = terms;
                        t2[0].X = Z;
                        return eval_chain(t2, p_t, node.P_R, node.sigma_dest)
                            .J_nats;
                    },
                    terms[0].X);
                note("chain.X",
                     rel_dev(ev.p_t * ev.Psi[0], fd, ev.J_nats, terms[0].X));

                const cmat gT =
                    chain_grad_T(terms, H_b, T, ev, node.P_S, node.P_R);
                const auto fdT = fd_gradient(
                    [&](const cmat& Z) {
                        std::vector<ChainTerm> t2 = terms;
                        const double q_t = node.P_S / Z.squaredNorm();
                        for (int i = 0; i < 2; ++i) {
                            t2[i].Hbar = H_b[i] * Z;
                            t2[i].Sigma_rx =
                                q_t * (H_b[i] * Z) * (H_b[i] * Z).adjoint() +
                                cmat::Identity(M, M);
                        }
                        return eval_chain(t2, q_t, node.P_R, node.sigma_dest)
                            .J_nats;
                    },
                    T);
                note("chain.T", rel_dev(gT, fdT, ev.J_nats, T));
            }

            // Projected-reception kernel, in nats.
            {
                std::vector<ProjTerm> pterms(2);
                for (int i = 0; i < 2; ++i) {
                    pterms[i].H_b = prng.matrix(M, M);
                    pterms[i].X = prng.matrix(M, h);
                    pterms[i].sigma2 = 1.0;
                }
                const cmat Y = prng.matrix(M, M);
                const ProjEval pv = eval_projected(pterms, Y, node.P_S);
                const auto fd = fd_gradient(
                    [&](const cmat& Z) {
                        return eval_projected(pterms, Z, node.P_S).J_nats;
                    },
                    Y);
                note("proj.Y", rel_dev(pv.grad_Y, fd, pv.J_nats, Y));
            }

            ++collected;
        } catch (const NumericalError&) {
            // Conditioning guard tripped; the next attempt replaces the draw.
        }
    }
    if (collected < spec.points)
        throw NumericalError("gradient_check: too many draws hit guards");
    return worst;
}

} // namespace altrelay
