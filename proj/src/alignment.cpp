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

#include "altrelay/alignment.hpp"

namespace altrelay {

SlowFadingParams naive_params(int M)
{
    if (M < 2 || M % 2 != 0)
        throw InvalidDimension("naive_params: M must be even and >= 2");
    const int h = M / 2;
    SlowFadingParams p;
    p.U_b = cmat::Identity(M, h);
    p.U_w = cmat::Identity(M, h);
    p.G_1 = cmat::Identity(h, h);
    p.G_2 = cmat::Identity(h, h);
    // Selecting the block complementary to U_b and U_w keeps the projector
    // sandwich U_w^perp G_3 U_b^perp at rank M/2; the leading-block choice
    // would be annihilated outright.
    p.G_3 = cmat::Zero(M, M);
    p.G_3.bottomRightCorner(h, h) = cmat::Identity(h, h);
    p.T_e = cmat::Identity(M, M);
    p.T_o = cmat::Identity(M, h);
    return p;
}

PerSlotParamsEven naive_even_params(int M)
{
    if (M < 2 || M % 2 != 0)
        throw InvalidDimension("naive_even_params: M must be even and >= 2");
    const int h = M / 2;
    const cmat I = cmat::Identity(M, M);
    PerSlotParamsEven p;
    p.U_w = I.leftCols(h);
    p.phi_3 = I.rightCols(h);
    p.T_e = I;
    return p;
}

PerSlotParamsOdd naive_odd_params(int M)
{
    if (M < 2 || M % 2 != 0)
        throw InvalidDimension("naive_odd_params: M must be even and >= 2");
    const int h = M / 2;
    const cmat I = cmat::Identity(M, M);
    PerSlotParamsOdd p;
    // U_b on the last M/2 columns keeps W_3 = U_b^perp psi_3 nonzero under
    // the pinned psi_3 = first M/2 identity columns.
    p.U_b = I.rightCols(h);
    p.phi_1 = cmat::Identity(h, h);
    p.phi_2 = cmat::Identity(h, h);
    p.T_o = I.leftCols(h);
    return p;
}

FilterBank build_slow(const SlowFadingParams& params, const ChannelSet& ch,
                      const NodeConfig& cfg)
{
    cmat H31i = inverse_checked(ch.H_31, "H_31");
    cmat H32i = inverse_checked(ch.H_32, "H_32");
    cmat H13i = inverse_checked(ch.H_13, "H_13");
    cmat H23i = inverse_checked(ch.H_23, "H_23");

    cmat Pb = orth_complement_projector(params.U_b);
    cmat Pw = orth_complement_projector(params.U_w);

    FilterBank bank;
    bank.F_1 = H31i * params.U_b * params.G_1 * params.U_w.adjoint() * H13i;
    bank.F_2 = H32i * params.U_b * params.G_2 * params.U_w.adjoint() * H23i;
    bank.F_3 = Pw * params.G_3 * Pb;
    bank.T_e = params.T_e;
    bank.T_o = params.T_o;
    complete_bank(bank, ch, cfg);
    return bank;
}

EvenSlotBuild build_even(const PerSlotParamsEven& params, const ChannelSet& ch,
                         const EvenSlotInput& prev)
{
    cmat Pw = orth_complement_projector(params.U_w);
    EvenSlotBuild out;
    out.B_3 = Pw * params.phi_3;
    out.F_3 = out.B_3 * prev.W_3.adjoint();
    out.T_e = params.T_e;
    out.W_1 = inverse_checked(ch.H_13, "H_13").adjoint() * params.U_w;
    out.W_2 = inverse_checked(ch.H_23, "H_23").adjoint() * params.U_w;
    return out;
}

OddSlotBuild build_odd(const PerSlotParamsOdd& params, const ChannelSet& ch,
                       const OddSlotInput& prev)
{
    const Eigen::Index M = params.U_b.rows();
    cmat Pb = orth_complement_projector(params.U_b);
    OddSlotBuild out;
    out.B_1 = inverse_checked(ch.H_31, "H_31") * params.U_b * params.phi_1;
    out.B_2 = inverse_checked(ch.H_32, "H_32") * params.U_b * params.phi_2;
    out.F_1 = out.B_1 * prev.W_1.adjoint();
    out.F_2 = out.B_2 * prev.W_2.adjoint();
    out.T_o = params.T_o;
    // psi_3 = first M/2 identity columns.
    out.W_3 = Pb.leftCols(M / 2);
    return out;
}

DistributedBuild build_distributed(const DistributedState& state,
                                   const ChannelSet& ch, DeliveryParity)
{
    if (!has_interrelay_reciprocity(ch))
        throw ReciprocityViolation(
            "build_distributed: channel pair lacks H_3i = H_i3^T");

    DistributedBuild out;
    out.Ubar_1 = state.Ubar_1.size() > 0
                     ? state.Ubar_1
                     : orthonormal_null_basis(ch.H_13 * state.B_3,
                                              state.B_3.rows() - state.B_3.cols());
    out.Ubar_2 = state.Ubar_2.size() > 0
                     ? state.Ubar_2
                     : orthonormal_null_basis(ch.H_23 * state.B_3,
                                              state.B_3.rows() - state.B_3.cols());
    out.F_1 = out.Ubar_1.conjugate() * state.xi_1 * out.Ubar_1.adjoint();
    out.F_2 = out.Ubar_2.conjugate() * state.xi_2 * out.Ubar_2.adjoint();
    out.F_3 = state.B_3 * state.W_3.adjoint();
    out.W_3_next = state.B_3.conjugate();
    return out;
}

double rx_leak_residual(const cmat& W, const std::vector<cmat>& H,
                        const std::vector<cmat>& B)
{
    if (H.size() != B.size())
        throw InvalidDimension("rx_leak_residual: H and B counts differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        double denom = W.norm() * H[i].norm() * B[i].norm();
        double leak = (W.adjoint() * H[i] * B[i]).norm();
        worst = std::max(worst, denom > 0.0 ? leak / denom : leak);
    }
    return worst;
}

} // namespace altrelay
