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
// Config parsing, result serialization, and the command-line front end.
//
// Configs are JSON; a flat TOML subset (key = value, dotted keys or one
// [section] level, arrays of numbers) is accepted as an alternate format.
// Results are CSV with LF line endings plus a JSON manifest that echoes the
// full configuration. Timestamps appear only in the manifest, so repeated
// runs with the same seed produce byte-identical CSV files.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "altrelay/simulate.hpp"

namespace altrelay {

// Malformed or out-of-range configuration input. The command line maps this
// to exit code 2; numerical failures map to exit code 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParsedConfig {
    ExperimentConfig cfg;
    // Whether the file (or a flag) set these explicitly. Subcommands pick
    // different defaults otherwise: outage runs 2000 trials, dof uses the
    // 40/60 dB grid, converge uses 30 dB with 50 runs.
    bool trials_explicit = false;
    bool snr_explicit = false;
};

// Parse and field-check a config. Unknown keys and type mismatches are
// collected and reported together in the exception message.
ParsedConfig parse_config_json(const std::string& text);
ParsedConfig parse_config_toml(const std::string& text);

// Dispatches on the file extension: .toml uses the TOML reader, everything
// else is treated as JSON.
ParsedConfig parse_config_file(const std::string& path);

// Range checks beyond parsing: M even and >= 2, probabilities in [0, 1],
// Armijo zeta and nu in (0, 1), positive counts, and scheme/scenario
// compatibility. Returns one human-readable message per violation; empty
// means the config is runnable.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// Full config as pretty JSON with stable key order. Feeding the result back
// through parse_config_json reproduces the config exactly.
std::string config_to_json(const ExperimentConfig& cfg);

// CSV serializations, header row first, LF endings, full double precision.
std::string metric_csv(const MetricSeries& series);
std::string convergence_csv(const ConvergenceStudy& study);

// Revision string baked in at build time.
std::string code_version();

// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& text);

// The altrelay command line. Subcommands: rate, outage, dof, converge,
// gradcheck, dump-channels. Returns 0 on success, 2 on configuration
// errors, 3 on numerical failure (including the resample cap and a failed
// gradcheck).
int cli_main(int argc, const char* const* argv);

} // namespace altrelay
