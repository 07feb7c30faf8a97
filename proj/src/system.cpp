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

#include "altrelay/system.hpp"

#include <cmath>

namespace altrelay {

namespace {

constexpr double kZeroTrace = 1e-300;
constexpr double kLn2 = 0.69314718055994530942;

double real_trace(const cmat& A)
{
    return A.trace().real();
}

} // namespace

double source_power_factor(const cmat& T, double P_S)
{
    double tt = T.squaredNorm(); // tr{T T^H}
    if (tt <= kZeroTrace)
        throw DegenerateInput("source_power_factor: precoder has zero power");
    return P_S / tt;
}

cmat relay_input_covariance(const cmat& H_iS, const cmat& T, double p_t,
                            double sigma_i2)
{
    cmat HT = H_iS * T;
    cmat S = p_t * (HT * HT.adjoint());
    S += sigma_i2 * cmat::Identity(H_iS.rows(), H_iS.rows());
    return 0.5 * (S + cmat(S.adjoint()));
}

double relay_power_factor(const cmat& F_i, const cmat& Sigma_i, double P_R)
{
    double tr = real_trace(F_i * Sigma_i * F_i.adjoint());
    if (tr <= kZeroTrace)
        throw DegenerateInput("relay_power_factor: amplifier transmits zero power");
    return P_R / tr;
}

cmat effective_channel(const FilterBank& bank, const ChannelSet& ch,
                       DeliveryParity parity)
{
    if (parity == DeliveryParity::even)
        return std::sqrt(bank.p_3) * (ch.H_D3 * bank.F_3 * ch.H_3S * bank.T_o);
    return std::sqrt(bank.p_1) * (ch.H_D1 * bank.F_1 * ch.H_1S * bank.T_e)
         + std::sqrt(bank.p_2) * (ch.H_D2 * bank.F_2 * ch.H_2S * bank.T_e);
}

cmat noise_covariance(const FilterBank& bank, const ChannelSet& ch,
                      DeliveryParity parity, const NodeConfig& cfg)
{
    const Eigen::Index M = ch.H_D3.rows();
    cmat S = cfg.sigma_dest * cmat::Identity(M, M);
    if (parity == DeliveryParity::even) {
        cmat A = ch.H_D3 * bank.F_3;
        S += cfg.sigma_relay[2] * bank.p_3 * (A * A.adjoint());
    } else {
        cmat A1 = ch.H_D1 * bank.F_1;
        cmat A2 = ch.H_D2 * bank.F_2;
        S += cfg.sigma_relay[0] * bank.p_1 * (A1 * A1.adjoint());
        S += cfg.sigma_relay[1] * bank.p_2 * (A2 * A2.adjoint());
    }
    return 0.5 * (S + cmat(S.adjoint()));
}

cmat mse_matrix(const cmat& H_eff, const cmat& Sigma_noise, double p_t,
                DeliveryParity parity)
{
    const Eigen::Index M = H_eff.rows();
    const Eigen::Index d = H_eff.cols();
    if (parity == DeliveryParity::even && d != M / 2)
        throw InvalidDimension("mse_matrix: even delivery carries M/2 streams");
    if (parity == DeliveryParity::odd && d != M)
        throw InvalidDimension("mse_matrix: odd delivery carries M streams");
    cmat Sinv_H = hermitian_pd_inverse(Sigma_noise) * H_eff;
    cmat Einv = cmat::Identity(d, d) + p_t * (H_eff.adjoint() * Sinv_H);
    return hermitian_pd_inverse(Einv);
}

cmat wiener_filter(const cmat& H_eff, const cmat& Sigma_noise, double p_t)
{
    cmat A = p_t * (H_eff * H_eff.adjoint()) + Sigma_noise;
    return hermitian_pd_inverse(A) * (std::sqrt(p_t) * H_eff);
}

cmat mse_of_filter(const cmat& W, const cmat& H_eff, const cmat& Sigma_noise,
                   double p_t)
{
    const Eigen::Index d = H_eff.cols();
    double sq = std::sqrt(p_t);
    cmat cross = sq * (W.adjoint() * H_eff);
    cmat A = p_t * (H_eff * H_eff.adjoint()) + Sigma_noise;
    return cmat::Identity(d, d) - cross - cross.adjoint()
         + W.adjoint() * A * W;
}

double sum_rate(const cmat& E)
{
    // I = log2 det E^{-1} = -ln det E / ln 2
    return -logdet_hermitian_pd(E) / kLn2;
}

double delivered_rate(const cmat& H_eff, const cmat& Sigma_noise, double p_t,
                      DeliveryParity parity)
{
    const Eigen::Index M = H_eff.rows();
    const Eigen::Index d = H_eff.cols();
    if (parity == DeliveryParity::even && d != M / 2)
        throw InvalidDimension("delivered_rate: even delivery carries M/2 streams");
    if (parity == DeliveryParity::odd && d != M)
        throw InvalidDimension("delivered_rate: odd delivery carries M streams");
    cmat Sinv_H = hermitian_pd_inverse(Sigma_noise) * H_eff;
    const auto ip = identity_plus_psd(p_t * (H_eff.adjoint() * Sinv_H));
    return ip.logdet / kLn2;
}

namespace {

// One zero-interference constraint operator, with the scale of its factors
// divided out. Zero factors contribute zero leakage.
double scaled_leak(const cmat& num, double denom)
{
    double n = num.norm();
    if (denom <= 0.0)
        return n;
    return n / denom;
}

} // namespace

double interference_residual(const FilterBank& bank, const ChannelSet& ch)
{
    double r_sum = scaled_leak(
        bank.F_3 * (ch.H_31 * bank.F_1 + ch.H_32 * bank.F_2),
        bank.F_3.norm() * (ch.H_31.norm() * bank.F_1.norm()
                           + ch.H_32.norm() * bank.F_2.norm()));
    double r1 = scaled_leak(bank.F_1 * ch.H_13 * bank.F_3,
                            bank.F_1.norm() * ch.H_13.norm() * bank.F_3.norm());
    double r2 = scaled_leak(bank.F_2 * ch.H_23 * bank.F_3,
                            bank.F_2.norm() * ch.H_23.norm() * bank.F_3.norm());
    return std::max(r_sum, std::max(r1, r2));
}

double two_slot_rate(const FilterBank& bank, const ChannelSet& ch,
                     const NodeConfig& cfg)
{
    if (interference_residual(bank, ch) >= 1e-8)
        throw InterferenceNotCancelled(
            "two_slot_rate: filter bank leaks inter-relay interference");

    double I_o = 0.0;
    if (bank.p_3 > 0.0 && bank.p_o > 0.0) {
        cmat H_o = effective_channel(bank, ch, DeliveryParity::even);
        cmat S_o = noise_covariance(bank, ch, DeliveryParity::even, cfg);
        I_o = delivered_rate(H_o, S_o, bank.p_o, DeliveryParity::even);
    }
    double I_e = 0.0;
    if ((bank.p_1 > 0.0 || bank.p_2 > 0.0) && bank.p_e > 0.0) {
        cmat H_e = effective_channel(bank, ch, DeliveryParity::odd);
        cmat S_e = noise_covariance(bank, ch, DeliveryParity::odd, cfg);
        I_e = delivered_rate(H_e, S_e, bank.p_e, DeliveryParity::odd);
    }
    return 0.5 * (I_o + I_e);
}

void complete_bank(FilterBank& bank, const ChannelSet& ch, const NodeConfig& cfg)
{
    bank.p_e = bank.T_e.squaredNorm() > kZeroTrace
                   ? source_power_factor(bank.T_e, cfg.P_S) : 0.0;
    bank.p_o = bank.T_o.squaredNorm() > kZeroTrace
                   ? source_power_factor(bank.T_o, cfg.P_S) : 0.0;

    // Relays 1 and 2 listen on even slots (precoder T_e); relay 3 listens on
    // odd slots (precoder T_o).
    bank.Sigma_1 = relay_input_covariance(ch.H_1S, bank.T_e, bank.p_e,
                                          cfg.sigma_relay[0]);
    bank.Sigma_2 = relay_input_covariance(ch.H_2S, bank.T_e, bank.p_e,
                                          cfg.sigma_relay[1]);
    bank.Sigma_3 = relay_input_covariance(ch.H_3S, bank.T_o, bank.p_o,
                                          cfg.sigma_relay[2]);

    auto safe_factor = [&](const cmat& F, const cmat& Sigma) {
        double tr = (F * Sigma * F.adjoint()).trace().real();
        return tr > kZeroTrace ? cfg.P_R / tr : 0.0;
    };
    bank.p_1 = safe_factor(bank.F_1, bank.Sigma_1);
    bank.p_2 = safe_factor(bank.F_2, bank.Sigma_2);
    bank.p_3 = safe_factor(bank.F_3, bank.Sigma_3);
}

} // namespace altrelay
