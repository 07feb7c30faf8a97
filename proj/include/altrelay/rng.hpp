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

#pragma once

#include <cstdint>

#include "altrelay/linalg.hpp"

namespace altrelay {

// Role of a derived substream within one Monte Carlo trial. Streams with
// different purposes never overlap, so e.g. re-drawing an initialization does
// not disturb the channel sequence.
enum class StreamPurpose : std::uint64_t {
    channels = 0,
    init = 1,
    bootstrap = 2,
    // Channel redraws after a numerical failure: purpose value is
    // resample_base + attempt (attempt = 1, 2, ...).
    resample_base = 100,
};

// Version-pinned PRNG contract
// ----------------------------
// The generator is SplitMix64 run in counter mode. All draws are pure
// functions of (seed, stream_id, purpose, draw index), which makes trials
// reproducible and safe to run concurrently.
//
//   mix64(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//             return z ^ (z >> 31)
//
//   key   = mix64(seed + 0x9E3779B97F4A7C15)
//   key   = mix64(key ^ (stream_id + 0xBF58476D1CE4E5B9))
//   state = mix64(key ^ (purpose   + 0x94D049BB133111EB))
//
//   next_u64(): state += 0x9E3779B97F4A7C15; return mix64(state)
//
// Uniform variates take the top 53 bits: u = (next_u64() >> 11) * 2^-53 in
// [0, 1); the Box-Muller radius uses ((next_u64() >> 11) + 1) * 2^-53 in
// (0, 1] so the logarithm never sees zero.
//
// Complex normal CN(0,1) uses one Box-Muller pair per draw:
//   r = sqrt(-2 ln u1), theta = 2 pi u2,
//   z = (r cos theta + i r sin theta) / sqrt(2),
// giving independent real and imaginary parts of variance 1/2 each.
//
// Changing any line above is a breaking change; frozen-value regression
// tests pin the exact sequences.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream_id,
                   std::uint64_t purpose = 0);
    GaussianStream(std::uint64_t seed, std::uint64_t stream_id, StreamPurpose p)
        : GaussianStream(seed, stream_id, static_cast<std::uint64_t>(p)) {}

    std::uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform();

    // Real standard normal N(0, 1).
    double normal();

    // Complex normal CN(0, 1): Re and Im each N(0, 1/2).
    cplx cnormal();

    // rows x cols matrix of i.i.d. CN(0,1) entries, filled row by row.
    cmat matrix(Eigen::Index rows, Eigen::Index cols);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace altrelay
