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

#include <cmath>
#include <vector>

#include "doctest.h"

#include "altrelay/simulate.hpp"

using namespace altrelay;

TEST_SUITE("simulate") {

TEST_CASE("outage probability is the empirical CDF at the threshold")
{
    CHECK(outage_probability({1.0, 3.0}, 2.0) == 0.5);
    CHECK(outage_probability({3.0, 4.0, 5.0}, 2.0) == 0.0);
    CHECK(outage_probability({1.0, 2.0}, 2.0) == 1.0); // ties count as outage
}

TEST_CASE("binomial half-width closed form")
{
    CHECK(binomial_halfwidth(0.5, 100) ==
          doctest::Approx(1.96 * std::sqrt(0.25 / 100.0)).epsilon(1e-12));
    CHECK(binomial_halfwidth(0.0, 50) == 0.0);
}

TEST_CASE("epsilon-outage rate picks the k-th smallest sample")
{
    std::vector<double> s = {10, 1, 9, 2, 8, 3, 7, 4, 6, 5};
    CHECK(epsilon_outage_rate(s, 0.1) == 1.0);
    CHECK(epsilon_outage_rate(s, 0.0) == 1.0);
    CHECK(epsilon_outage_rate(s, 0.3) == 3.0);
    CHECK(epsilon_outage_rate(s, 1.0) == 10.0);

    double prev = 0.0;
    for (double eps : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
        double r = epsilon_outage_rate(s, eps);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("pre-log slope recovers an exact synthetic scaling")
{
    auto rate = [](double d, double snr_db) {
        return d * std::log2(std::pow(10.0, snr_db / 10.0));
    };
    CHECK(dof_estimate(rate(3.0, 40), rate(3.0, 60), 40, 60) ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(dof_estimate(rate(1.5, 40), rate(1.5, 60), 40, 60) ==
          doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(dof_estimate(1.0, 2.0, 60, 40), InvalidDimension);
}

TEST_CASE("convergence aggregation pads short traces with their final value")
{
    ConvergenceAggregate one = convergence_aggregate({{1.0, 2.0, 3.0}});
    CHECK(one.mean == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(one.p10 == one.mean);
    CHECK(one.p90 == one.mean);

    ConvergenceAggregate two =
        convergence_aggregate({{0.0, 2.0, 4.0}, {10.0}});
    CHECK(two.mean == std::vector<double>{5.0, 6.0, 7.0});
    CHECK(two.p10 == std::vector<double>{0.0, 2.0, 4.0});
    CHECK(two.p90 == std::vector<double>{10.0, 10.0, 10.0});

    CHECK_THROWS_AS(convergence_aggregate({}), InvalidDimension);
}

TEST_CASE("power conventions split the SNR budget")
{
    ExperimentConfig cfg;
    cfg.M = 4;
    cfg.power = PowerConvention::equal;
    NodeConfig eq = node_config_for(cfg, 10.0);
    CHECK(eq.M == 4);
    CHECK(eq.P_S == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(eq.P_R == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(eq.sigma_dest == 1.0);

    cfg.power = PowerConvention::two_slot;
    NodeConfig ts = node_config_for(cfg, 10.0);
    CHECK(ts.P_S == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(ts.P_R == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("scheme, scenario, and power names round-trip")
{
    for (Scheme s :
         {Scheme::proposed_iterI, Scheme::proposed_iterII,
          Scheme::proposed_distributed, Scheme::proposed_naive,
          Scheme::best_relay_naive, Scheme::conventional_af_naive}) {
        Scheme back;
        CHECK(scheme_from_name(scheme_name(s), back));
        CHECK(back == s);
    }
    for (FadingScenario s :
         {FadingScenario::SlowFading, FadingScenario::BlockPerTwoSlots,
          FadingScenario::BlockPerSlot}) {
        FadingScenario back;
        CHECK(scenario_from_name(scenario_name(s), back));
        CHECK(back == s);
    }
    for (PowerConvention p :
         {PowerConvention::equal, PowerConvention::two_slot}) {
        PowerConvention back;
        CHECK(power_convention_from_name(power_convention_name(p), back));
        CHECK(back == p);
    }
    Scheme s;
    CHECK_FALSE(scheme_from_name("no_such_scheme", s));
    FadingScenario f;
    CHECK_FALSE(scenario_from_name("no_such_scenario", f));
    PowerConvention p;
    CHECK_FALSE(power_convention_from_name("no_such_power", p));
}

TEST_CASE("trials are deterministic functions of seed and index")
{
    ExperimentConfig cfg;
    cfg.scheme = Scheme::proposed_naive;
    cfg.scenario = FadingScenario::SlowFading;
    cfg.M = 2;
    cfg.seed = 5;
    NodeConfig node = node_config_for(cfg, 10.0);

    double a = trial_rate(cfg, node, 3);
    double b = trial_rate(cfg, node, 3);
    double c = trial_rate(cfg, node, 4);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("full sweeps reproduce bit for bit under one seed")
{
    ExperimentConfig cfg;
    cfg.scheme = Scheme::proposed_naive;
    cfg.scenario = FadingScenario::SlowFading;
    cfg.M = 2;
    cfg.trials = 5;
    cfg.seed = 12;
    cfg.snr_grid_db = {0.0, 10.0};

    MetricSeries r1 = run_trials(cfg);
    MetricSeries r2 = run_trials(cfg);
    REQUIRE(r1.samples.size() == 2);
    REQUIRE(r1.records.size() == 2);
    CHECK(r1.samples == r2.samples);
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        CHECK(r1.records[i].ergodic_rate_bits == r2.records[i].ergodic_rate_bits);
        CHECK(r1.records[i].n_trials == 5);
    }

    // The reductions match a direct recomputation from the raw samples.
    const auto& xs = r1.samples[1];
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    CHECK(r1.records[1].ergodic_rate_bits == doctest::Approx(mean).epsilon(1e-12));
    CHECK(r1.records[1].outage_prob ==
          outage_probability(xs, cfg.outage_threshold_bits));
    CHECK(r1.records[1].epsilon_outage_rate_bits ==
          epsilon_outage_rate(xs, cfg.epsilon_outage));
}

TEST_CASE("outage saturates at the extremes of the SNR axis")
{
    ExperimentConfig cfg;
    cfg.scheme = Scheme::proposed_naive;
    cfg.scenario = FadingScenario::SlowFading;
    cfg.M = 2;
    cfg.trials = 3;
    cfg.seed = 2;
    cfg.snr_grid_db = {-200.0, 200.0};

    MetricSeries r = run_trials(cfg);
    CHECK(r.records[0].outage_prob == 1.0);
    CHECK(r.records[1].outage_prob == 0.0);
}

TEST_CASE("convergence studies group traces by sub-problem")
{
    ExperimentConfig cfg;
    cfg.M = 2;
    cfg.trials = 2;
    cfg.seed = 3;
    cfg.snr_grid_db = {10.0};
    cfg.window_pairs = 2;
    cfg.armijo.max_outer_iters = 5;

    cfg.scheme = Scheme::proposed_iterI;
    cfg.scenario = FadingScenario::SlowFading;
    ConvergenceStudy s1 = run_convergence(cfg);
    REQUIRE(s1.groups.count("main") == 1);
    CHECK(s1.groups.size() == 1);
    CHECK(s1.groups["main"].size() == 2);
    CHECK(s1.aggregates.count("main") == 1);

    cfg.scheme = Scheme::proposed_iterII;
    cfg.scenario = FadingScenario::BlockPerSlot;
    ConvergenceStudy s2 = run_convergence(cfg);
    REQUIRE(s2.groups.count("even") == 1);
    REQUIRE(s2.groups.count("odd") == 1);
    CHECK(s2.groups["even"].size() == 4); // 2 trials x 2 even slots
    CHECK(s2.groups["odd"].size() == 4);

    cfg.scheme = Scheme::proposed_distributed;
    cfg.scenario = FadingScenario::BlockPerTwoSlots;
    ConvergenceStudy s3 = run_convergence(cfg);
    REQUIRE(s3.groups.count("case1") == 1);
    REQUIRE(s3.groups.count("case2") == 1);
    CHECK(s3.groups["case1"].size() == 2); // bootstrap pair contributes none
    CHECK(s3.groups["case2"].size() == 8); // 2 relays x 2 pairs x 2 trials

    for (const auto& tr : s3.groups["case2"]) {
        REQUIRE(!tr.objective_bits.empty());
        for (std::size_t i = 1; i < tr.objective_bits.size(); ++i)
            CHECK(tr.objective_bits[i] >= tr.objective_bits[i - 1] - 1e-12);
    }
}

} // TEST_SUITE
