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

#include "altrelay/io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "altrelay/gradients.hpp"

#ifndef ALTRELAY_GIT_REV
#define ALTRELAY_GIT_REV "unknown"
#endif

namespace altrelay {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string fmt_g(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_lines(const std::vector<std::string>& lines)
{
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i)
            out += "\n";
        out += lines[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config field reading (shared between the JSON and TOML front ends)
// ---------------------------------------------------------------------------

void read_armijo(const njson& j, ArmijoConfig& a, std::vector<std::string>& errs)
{
    static const std::set<std::string> known = {
        "zeta", "nu", "epsilon", "max_outer_iters", "max_backtracks"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            errs.push_back("unknown key 'armijo." + it.key() + "'");

    const auto num = [&](const char* key, double& into) {
        if (!j.contains(key))
            return;
        const njson& v = j.at(key);
        if (!v.is_number())
            errs.push_back(std::string("armijo.") + key + " must be a number");
        else
            into = v.get<double>();
    };
    const auto integer = [&](const char* key, int& into) {
        if (!j.contains(key))
            return;
        const njson& v = j.at(key);
        if (!v.is_number_integer())
            errs.push_back(std::string("armijo.") + key + " must be an integer");
        else
            into = v.get<int>();
    };
    num("zeta", a.zeta);
    num("nu", a.nu);
    num("epsilon", a.epsilon);
    integer("max_outer_iters", a.max_outer_iters);
    integer("max_backtracks", a.max_backtracks);
}

void read_fields(const njson& j, ParsedConfig& pc, std::vector<std::string>& errs)
{
    static const std::set<std::string> known = {
        "scheme",         "scenario",      "M",
        "snr_grid_db",    "trials",        "seed",
        "power",          "outage_threshold_bits", "epsilon_outage",
        "armijo",         "pure_random_init",      "window_pairs"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            errs.push_back("unknown key '" + it.key() + "'");

    if (j.contains("scheme")) {
        const njson& v = j.at("scheme");
        if (!v.is_string())
            errs.push_back("scheme must be a string");
        else if (!scheme_from_name(v.get<std::string>(), pc.cfg.scheme))
            errs.push_back("unknown scheme '" + v.get<std::string>() + "'");
    }
    if (j.contains("scenario")) {
        const njson& v = j.at("scenario");
        if (!v.is_string())
            errs.push_back("scenario must be a string");
        else if (!scenario_from_name(v.get<std::string>(), pc.cfg.scenario))
            errs.push_back("unknown scenario '" + v.get<std::string>() + "'");
    }
    if (j.contains("power")) {
        const njson& v = j.at("power");
        if (!v.is_string())
            errs.push_back("power must be a string");
        else if (!power_convention_from_name(v.get<std::string>(), pc.cfg.power))
            errs.push_back("unknown power convention '" + v.get<std::string>() +
                           "'");
    }
    if (j.contains("M")) {
        const njson& v = j.at("M");
        if (!v.is_number_integer())
            errs.push_back("M must be an integer");
        else
            pc.cfg.M = v.get<int>();
    }
    if (j.contains("snr_grid_db")) {
        const njson& v = j.at("snr_grid_db");
        if (!v.is_array())
            errs.push_back("snr_grid_db must be an array of numbers");
        else {
            std::vector<double> grid;
            bool ok = true;
            for (const njson& e : v) {
                if (!e.is_number()) {
                    errs.push_back("snr_grid_db entries must be numbers");
                    ok = false;
                    break;
                }
                grid.push_back(e.get<double>());
            }
            if (ok) {
                pc.cfg.snr_grid_db = std::move(grid);
                pc.snr_explicit = true;
            }
        }
    }
    if (j.contains("trials")) {
        const njson& v = j.at("trials");
        if (!v.is_number_integer())
            errs.push_back("trials must be an integer");
        else {
            pc.cfg.trials = v.get<int>();
            pc.trials_explicit = true;
        }
    }
    if (j.contains("seed")) {
        const njson& v = j.at("seed");
        if (!v.is_number_integer())
            errs.push_back("seed must be a nonnegative integer");
        else if (!v.is_number_unsigned() && v.get<long long>() < 0)
            errs.push_back("seed must be a nonnegative integer");
        else
            pc.cfg.seed = v.get<std::uint64_t>();
    }
    if (j.contains("outage_threshold_bits")) {
        const njson& v = j.at("outage_threshold_bits");
        if (!v.is_number())
            errs.push_back("outage_threshold_bits must be a number");
        else
            pc.cfg.outage_threshold_bits = v.get<double>();
    }
    if (j.contains("epsilon_outage")) {
        const njson& v = j.at("epsilon_outage");
        if (!v.is_number())
            errs.push_back("epsilon_outage must be a number");
        else
            pc.cfg.epsilon_outage = v.get<double>();
    }
    if (j.contains("pure_random_init")) {
        const njson& v = j.at("pure_random_init");
        if (!v.is_boolean())
            errs.push_back("pure_random_init must be a boolean");
        else
            pc.cfg.pure_random_init = v.get<bool>();
    }
    if (j.contains("window_pairs")) {
        const njson& v = j.at("window_pairs");
        if (!v.is_number_integer())
            errs.push_back("window_pairs must be an integer");
        else
            pc.cfg.window_pairs = v.get<int>();
    }
    if (j.contains("armijo")) {
        const njson& v = j.at("armijo");
        if (!v.is_object())
            errs.push_back("armijo must be an object");
        else
            read_armijo(v, pc.cfg.armijo, errs);
    }
}

// ---------------------------------------------------------------------------
// TOML flat subset
// ---------------------------------------------------------------------------

std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line)
{
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\'))
            quoted = !quoted;
        else if (line[i] == '#' && !quoted)
            return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& text, njson& out)
{
    try {
        std::size_t used = 0;
        if (text.find_first_of(".eE") == std::string::npos ||
            text.rfind("0x", 0) == 0) {
            const long long v = std::stoll(text, &used, 0);
            if (used == text.size()) {
                out = v;
                return true;
            }
        }
        used = 0;
        const double d = std::stod(text, &used);
        if (used == text.size()) {
            out = d;
            return true;
        }
    } catch (const std::exception&) {
    }
    return false;
}

bool parse_toml_value(const std::string& raw, njson& out, std::string& err)
{
    const std::string v = trim(raw);
    if (v.empty()) {
        err = "empty value";
        return false;
    }
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') {
            err = "unterminated string";
            return false;
        }
        std::string s;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            if (v[i] == '\\' && i + 2 < v.size()) {
                ++i;
                s += v[i] == 'n' ? '\n' : v[i];
            } else
                s += v[i];
        }
        out = s;
        return true;
    }
    if (v == "true" || v == "false") {
        out = (v == "true");
        return true;
    }
    if (v.front() == '[') {
        if (v.back() != ']') {
            err = "unterminated array";
            return false;
        }
        out = njson::array();
        const std::string inner = trim(v.substr(1, v.size() - 2));
        if (inner.empty())
            return true;
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            njson e;
            if (!parse_number(trim(item), e)) {
                err = "array entries must be numbers";
                return false;
            }
            out.push_back(e);
        }
        return true;
    }
    if (parse_number(v, out))
        return true;
    err = "cannot parse value '" + v + "'";
    return false;
}

void place_dotted(njson& root, const std::string& dotted, njson value,
                  std::vector<std::string>& errs)
{
    njson* node = &root;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', start);
        const std::string seg = trim(dotted.substr(
            start, dot == std::string::npos ? std::string::npos : dot - start));
        if (seg.empty()) {
            errs.push_back("bad key '" + dotted + "'");
            return;
        }
        if (dot == std::string::npos) {
            (*node)[seg] = std::move(value);
            return;
        }
        node = &(*node)[seg];
        start = dot + 1;
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Parsing entry points
// ---------------------------------------------------------------------------

ParsedConfig parse_config_json(const std::string& text)
{
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config root must be a JSON object");
    ParsedConfig pc;
    std::vector<std::string> errs;
    read_fields(j, pc, errs);
    if (!errs.empty())
        throw ConfigError(join_lines(errs));
    return pc;
}

ParsedConfig parse_config_toml(const std::string& text)
{
    njson j = njson::object();
    std::vector<std::string> errs;
    std::string prefix;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty())
            continue;
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3) {
                errs.push_back("line " + std::to_string(lineno) +
                               ": bad section header");
                continue;
            }
            prefix = trim(body.substr(1, body.size() - 2));
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) +
                           ": expected key = value");
            continue;
        }
        const std::string key = trim(body.substr(0, eq));
        njson value;
        std::string err;
        if (!parse_toml_value(body.substr(eq + 1), value, err)) {
            errs.push_back("line " + std::to_string(lineno) + ": " + err);
            continue;
        }
        place_dotted(j, prefix.empty() ? key : prefix + "." + key,
                     std::move(value), errs);
    }
    ParsedConfig pc;
    read_fields(j, pc, errs);
    if (!errs.empty())
        throw ConfigError(join_lines(errs));
    return pc;
}

ParsedConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml")
        return parse_config_toml(text);
    return parse_config_json(text);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<std::string> validate_config(const ExperimentConfig& cfg)
{
    std::vector<std::string> errs;
    if (cfg.M % 2 != 0)
        errs.push_back("M must be even");
    if (cfg.M < 2)
        errs.push_back("M must be at least 2");
    if (cfg.trials < 1)
        errs.push_back("trials must be at least 1");
    if (cfg.window_pairs < 2)
        errs.push_back("window_pairs must be at least 2");
    if (cfg.snr_grid_db.empty())
        errs.push_back("snr_grid_db must not be empty");
    if (!(cfg.epsilon_outage >= 0.0 && cfg.epsilon_outage <= 1.0))
        errs.push_back("epsilon_outage must lie in [0, 1]");
    if (!(cfg.outage_threshold_bits >= 0.0))
        errs.push_back("outage_threshold_bits must be nonnegative");
    if (!(cfg.armijo.zeta > 0.0 && cfg.armijo.zeta < 1.0))
        errs.push_back("armijo.zeta must lie in (0, 1)");
    if (!(cfg.armijo.nu > 0.0 && cfg.armijo.nu < 1.0))
        errs.push_back("armijo.nu must lie in (0, 1)");
    if (!(cfg.armijo.epsilon > 0.0))
        errs.push_back("armijo.epsilon must be positive");
    if (cfg.armijo.max_outer_iters < 1)
        errs.push_back("armijo.max_outer_iters must be at least 1");
    if (cfg.armijo.max_backtracks < 0)
        errs.push_back("armijo.max_backtracks must be nonnegative");

    const auto needs = [&](FadingScenario s) {
        if (cfg.scenario != s)
            errs.push_back("scheme " + scheme_name(cfg.scheme) +
                           " requires the " + scenario_name(s) + " scenario");
    };
    switch (cfg.scheme) {
    case Scheme::proposed_iterI: needs(FadingScenario::SlowFading); break;
    case Scheme::proposed_iterII: needs(FadingScenario::BlockPerSlot); break;
    case Scheme::proposed_distributed:
        needs(FadingScenario::BlockPerTwoSlots);
        break;
    default: break; // naive filters and baselines run under any fading
    }
    return errs;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

ojson config_json_object(const ExperimentConfig& cfg)
{
    ojson j;
    j["scheme"] = scheme_name(cfg.scheme);
    j["scenario"] = scenario_name(cfg.scenario);
    j["M"] = cfg.M;
    j["snr_grid_db"] = cfg.snr_grid_db;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["power"] = power_convention_name(cfg.power);
    j["outage_threshold_bits"] = cfg.outage_threshold_bits;
    j["epsilon_outage"] = cfg.epsilon_outage;
    j["pure_random_init"] = cfg.pure_random_init;
    j["window_pairs"] = cfg.window_pairs;
    j["armijo"] = {{"zeta", cfg.armijo.zeta},
                   {"nu", cfg.armijo.nu},
                   {"epsilon", cfg.armijo.epsilon},
                   {"max_outer_iters", cfg.armijo.max_outer_iters},
                   {"max_backtracks", cfg.armijo.max_backtracks}};
    return j;
}

} // namespace

std::string config_to_json(const ExperimentConfig& cfg)
{
    return config_json_object(cfg).dump(2) + "\n";
}

std::string metric_csv(const MetricSeries& series)
{
    std::string out = "snr_db,ergodic_rate_bits,outage_prob,"
                      "epsilon_outage_rate_bits,n_trials,rate_std_err\n";
    for (const SnrRecord& r : series.records) {
        out += fmt_g(r.snr_db) + "," + fmt_g(r.ergodic_rate_bits) + "," +
               fmt_g(r.outage_prob) + "," + fmt_g(r.epsilon_outage_rate_bits) +
               "," + std::to_string(r.n_trials) + "," + fmt_g(r.rate_std_err) +
               "\n";
    }
    return out;
}

std::string convergence_csv(const ConvergenceStudy& study)
{
    // Iteration 0 is the starting objective, before the first sweep.
    std::string out = "group,iter,mean_bits,p10_bits,p90_bits\n";
    for (const auto& [group, agg] : study.aggregates) {
        for (std::size_t i = 0; i < agg.mean.size(); ++i)
            out += group + "," + std::to_string(i) + "," + fmt_g(agg.mean[i]) +
                   "," + fmt_g(agg.p10[i]) + "," + fmt_g(agg.p90[i]) + "\n";
    }
    return out;
}

std::string code_version()
{
    return ALTRELAY_GIT_REV;
}

void write_text_file(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

namespace {

std::string utc_now()
{
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct SubOptions {
    CLI::App* cmd = nullptr;
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int workers = 0;
    int trials = 0;
    std::string snr_list;
    CLI::Option* o_config = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_trials = nullptr;
    CLI::Option* o_snr = nullptr;
};

SubOptions* add_subcommand(CLI::App& app,
                           std::vector<std::unique_ptr<SubOptions>>& store,
                           const std::string& name, const std::string& desc)
{
    store.push_back(std::make_unique<SubOptions>());
    SubOptions& so = *store.back();
    so.cmd = app.add_subcommand(name, desc);
    so.o_config =
        so.cmd->add_option("--config", so.config_path, "Config file (.json or .toml)");
    so.cmd->add_option("--out", so.out_dir, "Output directory (default: out)");
    so.o_seed = so.cmd->add_option("--seed", so.seed, "Override the RNG seed");
    so.cmd->add_option("--workers", so.workers,
                       "Worker threads for trials (0 = all cores)");
    so.o_trials =
        so.cmd->add_option("--trials", so.trials, "Override the trial count");
    so.o_snr = so.cmd->add_option(
        "--snr", so.snr_list, "Override the SNR grid, comma-separated dB values");
    return &so;
}

std::vector<double> parse_snr_list(const std::string& text)
{
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(trim(item), &used);
            if (used != trim(item).size())
                throw std::invalid_argument(item);
            grid.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("--snr: cannot parse '" + item + "'");
        }
    }
    if (grid.empty())
        throw ConfigError("--snr: empty list");
    return grid;
}

ParsedConfig load_config(const SubOptions& so)
{
    ParsedConfig pc;
    if (so.o_config->count() > 0)
        pc = parse_config_file(so.config_path);
    if (so.o_seed->count() > 0)
        pc.cfg.seed = so.seed;
    if (so.o_trials->count() > 0) {
        pc.cfg.trials = so.trials;
        pc.trials_explicit = true;
    }
    if (so.o_snr->count() > 0) {
        pc.cfg.snr_grid_db = parse_snr_list(so.snr_list);
        pc.snr_explicit = true;
    }
    return pc;
}

void require_valid(const ExperimentConfig& cfg)
{
    const std::vector<std::string> errs = validate_config(cfg);
    if (!errs.empty())
        throw ConfigError(join_lines(errs));
}

void write_outputs(const std::string& out_dir, const std::string& sub,
                   const ExperimentConfig& cfg, int workers,
                   const std::vector<std::pair<std::string, std::string>>& files,
                   const ojson& extra = ojson::object())
{
    const std::string dir = out_dir + "/" + sub;
    for (const auto& [name, content] : files)
        write_text_file(dir + "/" + name, content);

    ojson manifest;
    manifest["command"] = sub;
    manifest["config"] = config_json_object(cfg);
    manifest["code_version"] = code_version();
    manifest["seed"] = cfg.seed;
    manifest["workers_requested"] = workers;
    for (const auto& [k, v] : extra.items())
        manifest[k] = v;
    manifest["generated_at_utc"] = utc_now();
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

std::string series_filename(const ExperimentConfig& cfg)
{
    return scheme_name(cfg.scheme) + "_M" + std::to_string(cfg.M) + ".csv";
}

int run_rate_like(const SubOptions& so, const std::string& sub)
{
    ParsedConfig pc = load_config(so);
    if (sub == "outage" && !pc.trials_explicit)
        pc.cfg.trials = 2000;
    require_valid(pc.cfg);
    const MetricSeries series = run_trials(pc.cfg, so.workers);
    write_outputs(so.out_dir, sub, pc.cfg, so.workers,
                  {{series_filename(pc.cfg), metric_csv(series)}});
    return 0;
}

int run_dof(const SubOptions& so)
{
    ParsedConfig pc = load_config(so);
    if (!pc.snr_explicit)
        pc.cfg.snr_grid_db = {40.0, 60.0};
    require_valid(pc.cfg);
    if (pc.cfg.snr_grid_db.size() < 2 ||
        !(pc.cfg.snr_grid_db.back() > pc.cfg.snr_grid_db.front()))
        throw ConfigError("dof needs an increasing SNR grid with at least "
                          "two points");

    const MetricSeries series = run_trials(pc.cfg, so.workers);
    const SnrRecord& lo = series.records.front();
    const SnrRecord& hi = series.records.back();
    const double eta = dof_estimate(lo.ergodic_rate_bits, hi.ergodic_rate_bits,
                                    lo.snr_db, hi.snr_db);

    std::string dof_csv = "scheme,M,snr_lo_db,snr_hi_db,rate_lo_bits,"
                          "rate_hi_bits,dof_estimate\n";
    dof_csv += scheme_name(pc.cfg.scheme) + "," + std::to_string(pc.cfg.M) +
               "," + fmt_g(lo.snr_db) + "," + fmt_g(hi.snr_db) + "," +
               fmt_g(lo.ergodic_rate_bits) + "," + fmt_g(hi.ergodic_rate_bits) +
               "," + fmt_g(eta) + "\n";

    ojson extra;
    extra["dof_estimate"] = eta;
    write_outputs(so.out_dir, "dof", pc.cfg, so.workers,
                  {{series_filename(pc.cfg), metric_csv(series)},
                   {"dof.csv", dof_csv}},
                  extra);
    std::cout << "dof_estimate " << fmt_g(eta) << "\n";
    return 0;
}

int run_converge(const SubOptions& so)
{
    ParsedConfig pc = load_config(so);
    if (!pc.snr_explicit)
        pc.cfg.snr_grid_db = {30.0};
    if (!pc.trials_explicit)
        pc.cfg.trials = 50;
    require_valid(pc.cfg);
    if (pc.cfg.scheme != Scheme::proposed_iterI &&
        pc.cfg.scheme != Scheme::proposed_iterII &&
        pc.cfg.scheme != Scheme::proposed_distributed)
        throw ConfigError("converge needs an iterative scheme "
                          "(proposed_iterI, proposed_iterII, or "
                          "proposed_distributed)");

    const ConvergenceStudy study = run_convergence(pc.cfg, so.workers);
    write_outputs(so.out_dir, "converge", pc.cfg, so.workers,
                  {{series_filename(pc.cfg), convergence_csv(study)}});
    return 0;
}

int run_gradcheck(const SubOptions& so)
{
    ParsedConfig pc = load_config(so);
    const int points = pc.trials_explicit ? pc.cfg.trials : 20;
    if (points < 1)
        throw ConfigError("gradcheck needs at least one point");

    const double snrs[] = {0.0, 10.0, 30.0};
    const int sizes[] = {2, 4};
    std::string csv = "component,M,snr_db,max_rel_error\n";
    std::map<std::string, double> overall;
    std::printf("%-10s %3s %7s   %s\n", "component", "M", "snr_db",
                "max_rel_error");
    for (int M : sizes)
        for (double snr : snrs) {
            GradientCheckSpec spec;
            spec.M = M;
            spec.snr_db = snr;
            spec.seed = pc.cfg.seed;
            spec.points = points;
            for (const auto& [name, err] : gradient_check(spec)) {
                csv += name + "," + std::to_string(M) + "," + fmt_g(snr) + "," +
                       fmt_g(err) + "\n";
                std::printf("%-10s %3d %7.1f   %.3e\n", name.c_str(), M, snr,
                            err);
                auto [it, fresh] = overall.emplace(name, err);
                if (!fresh)
                    it->second = std::max(it->second, err);
            }
        }

    double worst = 0.0;
    for (const auto& [name, err] : overall)
        worst = std::max(worst, err);
    std::printf("worst %.3e (%s 1e-05)\n", worst,
                worst < 1e-5 ? "below" : "NOT below");

    ojson extra;
    extra["max_rel_error"] = worst;
    write_outputs(so.out_dir, "gradcheck", pc.cfg, so.workers,
                  {{"errors.csv", csv}}, extra);
    if (worst >= 1e-5) {
        std::cerr << "error: gradient_check: analytic and finite-difference "
                     "gradients disagree\n";
        return 3;
    }
    return 0;
}

int run_dump_channels(const SubOptions& so)
{
    ParsedConfig pc = load_config(so);
    if (!pc.trials_explicit)
        pc.cfg.trials = 1;
    require_valid(pc.cfg);

    const int n_slots = pc.cfg.scenario == FadingScenario::SlowFading
                            ? 1
                            : 2 * pc.cfg.window_pairs;
    std::string csv = "trial,slot,matrix,row,col,re,im\n";
    for (int t = 0; t < pc.cfg.trials; ++t) {
        GaussianStream rng(pc.cfg.seed, static_cast<std::uint64_t>(t),
                           StreamPurpose::channels);
        const auto seq =
            draw_channel_sequence(pc.cfg.scenario, pc.cfg.M, n_slots, rng);
        for (std::size_t s = 0; s < seq.size(); ++s) {
            const ChannelSet& ch = seq[s];
            const std::pair<const char*, const cmat*> mats[] = {
                {"H_1S", &ch.H_1S}, {"H_2S", &ch.H_2S}, {"H_3S", &ch.H_3S},
                {"H_D1", &ch.H_D1}, {"H_D2", &ch.H_D2}, {"H_D3", &ch.H_D3},
                {"H_13", &ch.H_13}, {"H_23", &ch.H_23}, {"H_31", &ch.H_31},
                {"H_32", &ch.H_32}};
            for (const auto& [name, m] : mats)
                for (Eigen::Index r = 0; r < m->rows(); ++r)
                    for (Eigen::Index c = 0; c < m->cols(); ++c)
                        csv += std::to_string(t) + "," + std::to_string(s) +
                               "," + name + "," + std::to_string(r) + "," +
                               std::to_string(c) + "," +
                               fmt_g((*m)(r, c).real()) + "," +
                               fmt_g((*m)(r, c).imag()) + "\n";
        }
    }
    write_outputs(so.out_dir, "dump-channels", pc.cfg, so.workers,
                  {{series_filename(pc.cfg), csv}});
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv)
{
    CLI::App app{"Link-level simulator for alternate MIMO amplify-and-forward "
                 "relaying with inter-relay interference alignment"};
    app.require_subcommand(1);
    std::vector<std::unique_ptr<SubOptions>> store;

    SubOptions* rate = add_subcommand(
        app, store, "rate", "Ergodic rate over an SNR grid (CSV per scheme)");
    SubOptions* outage = add_subcommand(
        app, store, "outage",
        "Outage probability and epsilon-outage rate (default 2000 trials)");
    SubOptions* dof = add_subcommand(
        app, store, "dof",
        "High-SNR slope of the rate curve (default grid 40,60 dB)");
    SubOptions* converge = add_subcommand(
        app, store, "converge",
        "Objective traces of the iterative designs (default 30 dB, 50 runs)");
    SubOptions* gradcheck = add_subcommand(
        app, store, "gradcheck",
        "Analytic gradients against finite differences (--trials sets points "
        "per component)");
    SubOptions* dump = add_subcommand(
        app, store, "dump-channels",
        "Raw channel draws as CSV for external reproduction (default 1 trial)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (rate->cmd->parsed())
            return run_rate_like(*rate, "rate");
        if (outage->cmd->parsed())
            return run_rate_like(*outage, "outage");
        if (dof->cmd->parsed())
            return run_dof(*dof);
        if (converge->cmd->parsed())
            return run_converge(*converge);
        if (gradcheck->cmd->parsed())
            return run_gradcheck(*gradcheck);
        if (dump->cmd->parsed())
            return run_dump_channels(*dump);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace altrelay
