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

#include "altrelay/optimizer.hpp"

#include <cmath>
#include <utility>

namespace altrelay {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Wraps an objective so that numerical failures during a trial step count as
// an arbitrarily bad candidate instead of aborting the line search.
double guarded(const ScalarObjective& f, const cmat& Z)
{
    try {
        return f(Z);
    } catch (const NumericalError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

// Basis factors stay usable only while their Gram matrix is well conditioned;
// an accepted step that ruins the conditioning is rolled back.
bool gram_ill_conditioned(const cmat& U)
{
    const double c = cond_2norm(U);
    return !(c * c <= kCondLimit);
}

cmat perturbed(const cmat& base, GaussianStream& rng, const InitConfig& init)
{
    if (init.pure_random)
        return rng.matrix(base.rows(), base.cols());
    return base + init.perturbation * rng.matrix(base.rows(), base.cols());
}

// Shared sweep driver. `step_variable(v, f_current) -> (f_new, mu)` performs
// one Armijo update of variable v in the enclosing state and reports the
// accepted step size (mu = 0 when the variable was rejected or rolled back).
template <typename StepFn>
OptimizerTrace sweep_loop(const std::vector<std::string>& variables,
                          double f_start, const ArmijoConfig& acfg,
                          StepFn&& step_variable)
{
    OptimizerTrace trace;
    trace.variables = variables;
    trace.objective_bits.push_back(f_start);
    double f = f_start;

    for (int k = 0; k < acfg.max_outer_iters; ++k) {
        const double f_before = f;
        std::vector<double> row(variables.size(), 0.0);
        bool any_accepted = false;
        for (std::size_t v = 0; v < variables.size(); ++v) {
            const auto [f_new, mu] = step_variable(v, f);
            if (mu > 0.0) {
                f = f_new;
                row[v] = mu;
                any_accepted = true;
            }
        }
        trace.objective_bits.push_back(f);
        trace.steps.push_back(std::move(row));
        if (!any_accepted) {
            trace.reason = StopReason::backtrack_failure;
            return trace;
        }
        if (f - f_before <= acfg.epsilon) {
            trace.reason = StopReason::converged;
            return trace;
        }
    }
    trace.reason = StopReason::max_iters;
    return trace;
}

} // namespace

// ---------------------------------------------------------------------------
// Armijo stepper
// ---------------------------------------------------------------------------

ArmijoStep armijo_step(const ScalarObjective& objective, const cmat& Z,
                       const cmat& grad, const ArmijoConfig& cfg, double f0)
{
    ArmijoStep out;
    out.Z_new = Z;

    const double g2 = grad.squaredNorm();
    if (!(g2 > 0.0))
        return out;

    if (std::isnan(f0))
        f0 = guarded(objective, Z);
    out.f_new = f0;
    if (!std::isfinite(f0))
        return out;

    double mu = 1.0;
    for (int m = 0; m <= cfg.max_backtracks; ++m, mu *= cfg.nu) {
        const cmat cand = Z + mu * grad;
        const double fc = guarded(objective, cand);
        if (std::isfinite(fc) && fc >= f0 + cfg.zeta * mu * g2) {
            out.Z_new = cand;
            out.f_new = fc;
            out.mu = mu;
            out.accepted = true;
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

SlowFadingParams initial_slow_params(int M, const InitConfig& init)
{
    GaussianStream rng(init.seed, init.stream,
                       static_cast<std::uint64_t>(StreamPurpose::init));
    const SlowFadingParams base = naive_params(M);
    SlowFadingParams p;
    p.U_b = perturbed(base.U_b, rng, init);
    p.U_w = perturbed(base.U_w, rng, init);
    p.G_1 = perturbed(base.G_1, rng, init);
    p.G_2 = perturbed(base.G_2, rng, init);
    p.G_3 = perturbed(base.G_3, rng, init);
    p.T_e = perturbed(base.T_e, rng, init);
    p.T_o = perturbed(base.T_o, rng, init);
    return p;
}

// ---------------------------------------------------------------------------
// Algorithm I
// ---------------------------------------------------------------------------

namespace {

cmat& slow_field(SlowFadingParams& p, std::size_t v)
{
    cmat* fields[] = {&p.U_b, &p.U_w, &p.G_1, &p.G_2, &p.G_3, &p.T_e, &p.T_o};
    return *fields[v];
}

const std::vector<std::string> kSlowVars = {"U_b", "U_w", "G_1", "G_2",
                                            "G_3", "T_e", "T_o"};

} // namespace

AlgorithmIResult iterative_algorithm_I(const ChannelSet& ch,
                                       const NodeConfig& cfg,
                                       const ArmijoConfig& acfg,
                                       const SlowFadingParams& start)
{
    AlgorithmIResult res;
    res.params = start;
    const double f0 = eval_f1(res.params, ch, cfg);

    auto step_variable = [&](std::size_t v, double f) -> std::pair<double, double> {
        // The shared bank changed with the previous variable, so the
        // gradient is recomputed for each update.
        const GradientSet grads = grad_f1(res.params, ch, cfg);
        const cmat& g = grads.at(kSlowVars[v]);
        auto objective = [&](const cmat& Z) {
            SlowFadingParams trial = res.params;
            slow_field(trial, v) = Z;
            return eval_f1(trial, ch, cfg);
        };
        const ArmijoStep st = armijo_step(objective, slow_field(res.params, v),
                                          g, acfg, f);
        if (!st.accepted)
            return {f, 0.0};
        if (v <= 1 && gram_ill_conditioned(st.Z_new))
            return {f, 0.0};
        slow_field(res.params, v) = st.Z_new;
        return {st.f_new, st.mu};
    };

    res.trace = sweep_loop(kSlowVars, f0, acfg, step_variable);
    res.bank = build_slow(res.params, ch, cfg);
    return res;
}

AlgorithmIResult iterative_algorithm_I(const ChannelSet& ch,
                                       const NodeConfig& cfg,
                                       const ArmijoConfig& acfg,
                                       const InitConfig& init)
{
    return iterative_algorithm_I(ch, cfg, acfg,
                                 initial_slow_params(cfg.M, init));
}

// ---------------------------------------------------------------------------
// Algorithm II
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kEvenVars = {"U_w", "phi_3", "T_e"};
const std::vector<std::string> kOddVars = {"U_b", "phi_1", "phi_2", "T_o"};

cmat& even_field(PerSlotParamsEven& p, std::size_t v)
{
    cmat* fields[] = {&p.U_w, &p.phi_3, &p.T_e};
    return *fields[v];
}

cmat& odd_field(PerSlotParamsOdd& p, std::size_t v)
{
    cmat* fields[] = {&p.U_b, &p.phi_1, &p.phi_2, &p.T_o};
    return *fields[v];
}

EvenSlotResult optimize_even_slot(const ChannelSet& ch,
                                  const EvenSlotContext& ctx,
                                  const NodeConfig& cfg,
                                  const ArmijoConfig& acfg,
                                  GaussianStream& rng,
                                  const InitConfig& init)
{
    EvenSlotResult res;
    auto& p = res.params;
    const PerSlotParamsEven base = naive_even_params(cfg.M);
    p.U_w = perturbed(base.U_w, rng, init);
    p.phi_3 = perturbed(base.phi_3, rng, init);
    p.T_e = perturbed(base.T_e, rng, init);

    const double f0 = eval_f2(p, ch, ctx, cfg);
    auto step_variable = [&](std::size_t v, double f) -> std::pair<double, double> {
        const GradientSet grads = grad_f2(p, ch, ctx, cfg);
        const cmat& g = grads.at(kEvenVars[v]);
        auto objective = [&](const cmat& Z) {
            PerSlotParamsEven trial = p;
            even_field(trial, v) = Z;
            return eval_f2(trial, ch, ctx, cfg);
        };
        const ArmijoStep st = armijo_step(objective, even_field(p, v), g, acfg, f);
        if (!st.accepted)
            return {f, 0.0};
        if (v == 0 && gram_ill_conditioned(st.Z_new))
            return {f, 0.0};
        even_field(p, v) = st.Z_new;
        return {st.f_new, st.mu};
    };
    res.trace = sweep_loop(kEvenVars, f0, acfg, step_variable);

    const EvenSlotBuild build = build_even(p, ch, ctx.prev);
    res.F_3 = build.F_3;
    res.W_1 = build.W_1;
    res.W_2 = build.W_2;
    return res;
}

OddSlotResult optimize_odd_slot(const ChannelSet& ch, const OddSlotContext& ctx,
                                const NodeConfig& cfg, const ArmijoConfig& acfg,
                                GaussianStream& rng, const InitConfig& init)
{
    OddSlotResult res;
    auto& p = res.params;
    const PerSlotParamsOdd base = naive_odd_params(cfg.M);
    p.U_b = perturbed(base.U_b, rng, init);
    p.phi_1 = perturbed(base.phi_1, rng, init);
    p.phi_2 = perturbed(base.phi_2, rng, init);
    p.T_o = perturbed(base.T_o, rng, init);

    const double f0 = eval_f3(p, ch, ctx, cfg);
    auto step_variable = [&](std::size_t v, double f) -> std::pair<double, double> {
        const GradientSet grads = grad_f3(p, ch, ctx, cfg);
        const cmat& g = grads.at(kOddVars[v]);
        auto objective = [&](const cmat& Z) {
            PerSlotParamsOdd trial = p;
            odd_field(trial, v) = Z;
            return eval_f3(trial, ch, ctx, cfg);
        };
        const ArmijoStep st = armijo_step(objective, odd_field(p, v), g, acfg, f);
        if (!st.accepted)
            return {f, 0.0};
        if (v == 0 && gram_ill_conditioned(st.Z_new))
            return {f, 0.0};
        odd_field(p, v) = st.Z_new;
        return {st.f_new, st.mu};
    };
    res.trace = sweep_loop(kOddVars, f0, acfg, step_variable);

    const OddSlotBuild build = build_odd(p, ch, ctx.prev);
    res.F_1 = build.F_1;
    res.F_2 = build.F_2;
    res.B_1 = build.B_1;
    res.B_2 = build.B_2;
    res.W_3 = build.W_3;
    return res;
}

} // namespace

AlgorithmIIRun iterative_algorithm_II(const std::vector<ChannelSet>& seq,
                                      const NodeConfig& cfg,
                                      const ArmijoConfig& acfg,
                                      const InitConfig& init)
{
    if (seq.empty())
        throw InvalidDimension("iterative_algorithm_II: empty channel sequence");

    GaussianStream rng(init.seed, init.stream,
                       static_cast<std::uint64_t>(StreamPurpose::init));
    const Eigen::Index M = cfg.M;
    const Eigen::Index h = M / 2;

    AlgorithmIIRun run;
    // Slot 0 forwards nothing: a zero handoff silences relay 3's delivery
    // term and its gradient, leaving the capture terms to optimize.
    EvenSlotContext ectx;
    ectx.prev.T_o = cmat::Zero(M, h);
    ectx.prev.W_3 = cmat::Zero(M, h);
    ectx.H_3S_prev = cmat::Zero(M, M);

    OddSlotContext octx;

    for (std::size_t n = 0; n < seq.size(); ++n) {
        const ChannelSet& ch = seq[n];
        if (n % 2 == 0) {
            EvenSlotResult r = optimize_even_slot(ch, ectx, cfg, acfg, rng, init);
            octx.prev.T_e = r.params.T_e;
            octx.prev.W_1 = r.W_1;
            octx.prev.W_2 = r.W_2;
            octx.H_1S_prev = ch.H_1S;
            octx.H_2S_prev = ch.H_2S;
            run.even.push_back(std::move(r));
        } else {
            OddSlotResult r = optimize_odd_slot(ch, octx, cfg, acfg, rng, init);
            ectx.prev.T_o = r.params.T_o;
            ectx.prev.W_3 = r.W_3;
            ectx.H_3S_prev = ch.H_3S;
            run.odd.push_back(std::move(r));
        }
    }
    return run;
}

// ---------------------------------------------------------------------------
// Distributed design
// ---------------------------------------------------------------------------

std::vector<DistributedPairResult>
distributed_algorithm(const std::vector<ChannelSet>& seq, const NodeConfig& cfg,
                      const ArmijoConfig& acfg, const InitConfig& init)
{
    if (seq.empty() || seq.size() % 2 != 0)
        throw InvalidDimension(
            "distributed_algorithm: sequence must pair even and odd slots");

    const Eigen::Index M = cfg.M;
    const Eigen::Index h = M / 2;
    const cmat I = cmat::Identity(M, M);
    const cmat T_e = I;
    const cmat T_o = I.leftCols(h);

    GaussianStream init_rng(init.seed, init.stream,
                            static_cast<std::uint64_t>(StreamPurpose::init));
    GaussianStream boot_rng(init.seed, init.stream,
                            static_cast<std::uint64_t>(StreamPurpose::bootstrap));

    std::vector<DistributedPairResult> pairs;
    cmat W_3 = cmat::Zero(M, h);      // no receive factor before the first pair
    cmat T_o_prev = cmat::Zero(M, h); // and no data to deliver
    cmat H_3S_prev_pair = cmat::Zero(M, M);

    for (std::size_t n = 0; n + 1 < seq.size(); n += 2) {
        const ChannelSet& che = seq[n];
        const ChannelSet& cho = seq[n + 1];
        if (!has_interrelay_reciprocity(che) || !has_interrelay_reciprocity(cho))
            throw ReciprocityViolation(
                "distributed_algorithm: inter-relay channels must be reciprocal");

        DistributedPairResult pr;
        if (n == 0) {
            // Bootstrap: nothing to forward yet, so B_3 is only a receive
            // factor for the upcoming odd slot; a random orthonormal basis
            // works and costs one pair of warm-up slots.
            const cmat rand = boot_rng.matrix(M, h);
            Eigen::HouseholderQR<cmat> qr(rand);
            pr.B_3 = qr.householderQ() * cmat::Identity(M, h);
            pr.F_3 = cmat::Zero(M, M);
        } else {
            DistributedEvenContext ctx;
            ctx.W_3 = W_3;
            ctx.T_o = T_o_prev;
            ctx.H_3S_prev = H_3S_prev_pair;
            ctx.H_D3 = che.H_D3;
            ctx.H_3S_next = che.H_3S; // same pair as the upcoming odd slot
            ctx.T_o_next = T_o;

            cmat B_3 = perturbed(I.rightCols(h), init_rng, init);
            const double f0 = eval_f4(B_3, ctx, cfg);
            auto step_variable = [&](std::size_t,
                                     double f) -> std::pair<double, double> {
                const cmat g = grad_f4(B_3, ctx, cfg);
                auto objective = [&](const cmat& Z) {
                    return eval_f4(Z, ctx, cfg);
                };
                const ArmijoStep st = armijo_step(objective, B_3, g, acfg, f);
                if (!st.accepted)
                    return {f, 0.0};
                if (gram_ill_conditioned(st.Z_new))
                    return {f, 0.0};
                B_3 = st.Z_new;
                return {st.f_new, st.mu};
            };
            pr.trace_B3 = sweep_loop({"B_3"}, f0, acfg, step_variable);
            pr.B_3 = B_3;
            pr.F_3 = B_3 * W_3.adjoint();
        }
        pr.W_3_next = pr.B_3.conjugate();

        // Odd slot: each relay works from its own link set alone.
        DistributedState state;
        state.B_3 = pr.B_3;
        state.W_3 = W_3;
        state.xi_1 = cmat::Identity(h, h);
        state.xi_2 = cmat::Identity(h, h);
        const DistributedBuild basis = build_distributed(state, cho,
                                                         DeliveryParity::odd);
        pr.Ubar_1 = basis.Ubar_1;
        pr.Ubar_2 = basis.Ubar_2;

        const RelayLocalView views[2] = {
            {che.H_1S, cho.H_D1, cho.H_13,
             cfg.sigma_relay[0] * cfg.sigma_relay[0], T_e},
            {che.H_2S, cho.H_D2, cho.H_23,
             cfg.sigma_relay[1] * cfg.sigma_relay[1], T_e},
        };
        const cmat* Ubars[2] = {&pr.Ubar_1, &pr.Ubar_2};
        cmat xis[2];
        OptimizerTrace* traces[2] = {&pr.trace_xi1, &pr.trace_xi2};
        for (int i = 0; i < 2; ++i) {
            cmat xi = perturbed(cmat::Identity(h, h), init_rng, init);
            const double f0 = eval_fei(xi, *Ubars[i], views[i], cfg);
            auto step_variable = [&](std::size_t,
                                     double f) -> std::pair<double, double> {
                const cmat g = grad_fei(xi, *Ubars[i], views[i], cfg);
                auto objective = [&](const cmat& Z) {
                    return eval_fei(Z, *Ubars[i], views[i], cfg);
                };
                const ArmijoStep st = armijo_step(objective, xi, g, acfg, f);
                if (!st.accepted)
                    return {f, 0.0};
                xi = st.Z_new;
                return {st.f_new, st.mu};
            };
            *traces[i] = sweep_loop({"xi"}, f0, acfg, step_variable);
            xis[i] = xi;
        }
        pr.xi_1 = xis[0];
        pr.xi_2 = xis[1];
        pr.F_1 = pr.Ubar_1.conjugate() * pr.xi_1 * pr.Ubar_1.adjoint();
        pr.F_2 = pr.Ubar_2.conjugate() * pr.xi_2 * pr.Ubar_2.adjoint();

        H_3S_prev_pair = cho.H_3S;
        W_3 = pr.W_3_next;
        T_o_prev = T_o;
        pairs.push_back(std::move(pr));
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// One-relay baselines
// ---------------------------------------------------------------------------

double conventional_af_rate(const ChannelSet& rx, const ChannelSet& tx,
                            int relay_index, const NodeConfig& cfg)
{
    if (relay_index < 1 || relay_index > 3)
        throw InvalidDimension("conventional_af_rate: relay index must be 1..3");

    const Eigen::Index M = cfg.M;
    const cmat* Hb[3] = {&rx.H_1S, &rx.H_2S, &rx.H_3S};
    const cmat* Hf[3] = {&tx.H_D1, &tx.H_D2, &tx.H_D3};
    const cmat& H_bS = *Hb[relay_index - 1];
    const cmat& H_Df = *Hf[relay_index - 1];
    const double s2 = cfg.sigma_relay[relay_index - 1] *
                      cfg.sigma_relay[relay_index - 1];

    const double p_t = cfg.P_S / static_cast<double>(M); // T = I_M
    const cmat Sigma_in = p_t * H_bS * H_bS.adjoint() +
                          s2 * cmat::Identity(M, M);
    const double p = cfg.P_R / std::real(Sigma_in.trace()); // F = sqrt(p) I
    const cmat H = std::sqrt(p) * H_Df * H_bS;
    const cmat Sigma = s2 * p * H_Df * H_Df.adjoint() +
                       cfg.sigma_dest * cfg.sigma_dest * cmat::Identity(M, M);
    // All M streams arrive in one hop-pair, matching the odd-parity stream
    // count; the 1/2 accounts for the two slots each block occupies.
    return 0.5 * delivered_rate(H, Sigma, p_t, DeliveryParity::odd);
}

double best_relay_rate(const ChannelSet& rx, const ChannelSet& tx,
                       const NodeConfig& cfg)
{
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 3; ++k)
        best = std::max(best, conventional_af_rate(rx, tx, k, cfg));
    return best;
}

} // namespace altrelay
