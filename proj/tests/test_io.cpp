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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "altrelay/io.hpp"

using namespace altrelay;

namespace {

ExperimentConfig nondefault_config()
{
    ExperimentConfig cfg;
    cfg.scheme = Scheme::proposed_iterII;
    cfg.scenario = FadingScenario::BlockPerSlot;
    cfg.M = 2;
    cfg.snr_grid_db = {1.5, 2.5, 30.0};
    cfg.trials = 7;
    cfg.seed = 99;
    cfg.power = PowerConvention::two_slot;
    cfg.outage_threshold_bits = 3.25;
    cfg.epsilon_outage = 0.05;
    cfg.pure_random_init = true;
    cfg.window_pairs = 4;
    cfg.armijo.zeta = 0.3;
    cfg.armijo.nu = 0.6;
    cfg.armijo.epsilon = 1e-3;
    cfg.armijo.max_outer_iters = 55;
    cfg.armijo.max_backtracks = 17;
    return cfg;
}

void check_equal(const ExperimentConfig& a, const ExperimentConfig& b)
{
    CHECK(a.scheme == b.scheme);
    CHECK(a.scenario == b.scenario);
    CHECK(a.M == b.M);
    CHECK(a.snr_grid_db == b.snr_grid_db);
    CHECK(a.trials == b.trials);
    CHECK(a.seed == b.seed);
    CHECK(a.power == b.power);
    CHECK(a.outage_threshold_bits == b.outage_threshold_bits);
    CHECK(a.epsilon_outage == b.epsilon_outage);
    CHECK(a.pure_random_init == b.pure_random_init);
    CHECK(a.window_pairs == b.window_pairs);
    CHECK(a.armijo.zeta == b.armijo.zeta);
    CHECK(a.armijo.nu == b.armijo.nu);
    CHECK(a.armijo.epsilon == b.armijo.epsilon);
    CHECK(a.armijo.max_outer_iters == b.armijo.max_outer_iters);
    CHECK(a.armijo.max_backtracks == b.armijo.max_backtracks);
}

bool has_message(const std::vector<std::string>& msgs, const std::string& want)
{
    return std::find(msgs.begin(), msgs.end(), want) != msgs.end();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("JSON serialization round-trips every field")
{
    ExperimentConfig cfg = nondefault_config();
    std::string text = config_to_json(cfg);
    ParsedConfig back = parse_config_json(text);
    check_equal(back.cfg, cfg);
    CHECK(back.trials_explicit);
    CHECK(back.snr_explicit);

    // Stable top-level key order keeps manifests diffable.
    CHECK(text.find("\"scheme\"") < text.find("\"scenario\""));
    CHECK(text.find("\"scenario\"") < text.find("\"M\""));
    CHECK(text.find("\"M\"") < text.find("\"snr_grid_db\""));
    CHECK(text.find("\"seed\"") < text.find("\"power\""));
    CHECK(text.find("\"window_pairs\"") < text.find("\"armijo\""));
}

TEST_CASE("an empty config keeps the defaults and marks nothing explicit")
{
    ParsedConfig pc = parse_config_json("{}");
    check_equal(pc.cfg, ExperimentConfig{});
    CHECK_FALSE(pc.trials_explicit);
    CHECK_FALSE(pc.snr_explicit);

    ParsedConfig pt = parse_config_json("{\"trials\": 10}");
    CHECK(pt.trials_explicit);
    CHECK_FALSE(pt.snr_explicit);
    CHECK(pt.cfg.trials == 10);
}

TEST_CASE("unknown keys and type mismatches are reported together")
{
    try {
        parse_config_json("{\"trails\": 5, \"M\": \"four\"}");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("unknown key 'trails'") != std::string::npos);
        CHECK(msg.find("M must be an integer") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("[1,2]"), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"armijo\": {\"zate\": 1}}"),
                    ConfigError);
}

TEST_CASE("the TOML reader accepts sections, dotted keys, and comments")
{
    const std::string toml =
        "# experiment description\n"
        "scheme = \"proposed_iterII\"\n"
        "scenario = \"block_per_slot\"   # per-slot fading\n"
        "M = 2\n"
        "snr_grid_db = [1.5, 2.5, 30.0]\n"
        "trials = 7\n"
        "seed = 99\n"
        "power = \"two_slot\"\n"
        "outage_threshold_bits = 3.25\n"
        "epsilon_outage = 0.05\n"
        "pure_random_init = true\n"
        "window_pairs = 4\n"
        "armijo.zeta = 0.3\n"
        "\n"
        "[armijo]\n"
        "nu = 0.6\n"
        "epsilon = 1e-3\n"
        "max_outer_iters = 55\n"
        "max_backtracks = 17\n";
    ParsedConfig pc = parse_config_toml(toml);
    check_equal(pc.cfg, nondefault_config());

    CHECK_THROWS_AS(parse_config_toml("M 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_toml("snr_grid_db = [1, oops]\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_toml("[bad\nM = 4\n"), ConfigError);
}

TEST_CASE("file parsing dispatches on the extension")
{
    const std::string dir = "io_tmp_cfg";
    write_text_file(dir + "/a.json", config_to_json(nondefault_config()));
    write_text_file(dir + "/a.toml",
                    "scheme = \"proposed_iterII\"\n"
                    "scenario = \"block_per_slot\"\n");
    ParsedConfig pj = parse_config_file(dir + "/a.json");
    check_equal(pj.cfg, nondefault_config());
    ParsedConfig pt = parse_config_file(dir + "/a.toml");
    CHECK(pt.cfg.scheme == Scheme::proposed_iterII);
    CHECK_THROWS_AS(parse_config_file(dir + "/missing.json"), ConfigError);
    std::remove((dir + "/a.json").c_str());
    std::remove((dir + "/a.toml").c_str());
}

TEST_CASE("validation messages name each violation")
{
    ExperimentConfig ok;
    CHECK(validate_config(ok).empty());

    ExperimentConfig cfg;
    cfg.M = 3;
    auto msgs = validate_config(cfg);
    CHECK(has_message(msgs, "M must be even"));

    cfg.M = 0;
    msgs = validate_config(cfg);
    CHECK(has_message(msgs, "M must be at least 2"));

    cfg = ExperimentConfig{};
    cfg.trials = 0;
    cfg.window_pairs = 1;
    cfg.snr_grid_db.clear();
    cfg.epsilon_outage = 1.5;
    cfg.outage_threshold_bits = -1.0;
    cfg.armijo.zeta = 1.5;
    cfg.armijo.nu = 0.0;
    cfg.armijo.epsilon = 0.0;
    cfg.armijo.max_outer_iters = 0;
    cfg.armijo.max_backtracks = -1;
    msgs = validate_config(cfg);
    CHECK(has_message(msgs, "trials must be at least 1"));
    CHECK(has_message(msgs, "window_pairs must be at least 2"));
    CHECK(has_message(msgs, "snr_grid_db must not be empty"));
    CHECK(has_message(msgs, "epsilon_outage must lie in [0, 1]"));
    CHECK(has_message(msgs, "outage_threshold_bits must be nonnegative"));
    CHECK(has_message(msgs, "armijo.zeta must lie in (0, 1)"));
    CHECK(has_message(msgs, "armijo.nu must lie in (0, 1)"));
    CHECK(has_message(msgs, "armijo.epsilon must be positive"));
    CHECK(has_message(msgs, "armijo.max_outer_iters must be at least 1"));
    CHECK(has_message(msgs, "armijo.max_backtracks must be nonnegative"));

    ExperimentConfig mismatch;
    mismatch.scheme = Scheme::proposed_iterI;
    mismatch.scenario = FadingScenario::BlockPerSlot;
    msgs = validate_config(mismatch);
    CHECK(has_message(
        msgs, "scheme proposed_iterI requires the slow_fading scenario"));

    mismatch.scheme = Scheme::proposed_distributed;
    mismatch.scenario = FadingScenario::SlowFading;
    msgs = validate_config(mismatch);
    CHECK(has_message(
        msgs,
        "scheme proposed_distributed requires the block_per_two_slots "
        "scenario"));
}

TEST_CASE("metric CSV layout is exact and line endings are LF")
{
    MetricSeries series;
    SnrRecord rec;
    rec.snr_db = 0.0;
    rec.ergodic_rate_bits = 1.5;
    rec.outage_prob = 0.25;
    rec.epsilon_outage_rate_bits = 0.75;
    rec.n_trials = 4;
    rec.rate_std_err = 0.125;
    series.records.push_back(rec);

    std::string csv = metric_csv(series);
    CHECK(csv ==
          "snr_db,ergodic_rate_bits,outage_prob,epsilon_outage_rate_bits,"
          "n_trials,rate_std_err\n0,1.5,0.25,0.75,4,0.125\n");
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("CSV doubles survive a text round-trip bit for bit")
{
    MetricSeries series;
    SnrRecord rec;
    rec.snr_db = 10.0;
    rec.ergodic_rate_bits = 1.0 / 3.0;
    rec.outage_prob = 2.0 / 7.0;
    rec.epsilon_outage_rate_bits = 1e-17;
    rec.n_trials = 3;
    rec.rate_std_err = 1.0 / 9.0;
    series.records.push_back(rec);

    std::string csv = metric_csv(series);
    std::size_t nl = csv.find('\n');
    std::string row = csv.substr(nl + 1, csv.find('\n', nl + 1) - nl - 1);

    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= row.size()) {
        std::size_t comma = row.find(',', start);
        std::string cell = row.substr(
            start, comma == std::string::npos ? std::string::npos
                                              : comma - start);
        vals.push_back(std::stod(cell));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    REQUIRE(vals.size() == 6);
    CHECK(vals[1] == 1.0 / 3.0);
    CHECK(vals[2] == 2.0 / 7.0);
    CHECK(vals[3] == 1e-17);
    CHECK(vals[5] == 1.0 / 9.0);
}

TEST_CASE("convergence CSV flattens the aggregates per group")
{
    ConvergenceStudy study;
    study.aggregates["main"].mean = {1.0, 2.0};
    study.aggregates["main"].p10 = {0.0, 1.0};
    study.aggregates["main"].p90 = {2.0, 3.0};

    CHECK(convergence_csv(study) ==
          "group,iter,mean_bits,p10_bits,p90_bits\n"
          "main,0,1,0,2\n"
          "main,1,2,1,3\n");
}

TEST_CASE("text files land in freshly created directories")
{
    const std::string path = "io_tmp_out/deep/nest/x.txt";
    write_text_file(path, "payload\n");
    CHECK(slurp(path) == "payload\n");
    std::remove(path.c_str());
}

TEST_CASE("the build stamps a revision string")
{
    CHECK(!code_version().empty());
}

} // TEST_SUITE
