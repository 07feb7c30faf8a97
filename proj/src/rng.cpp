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

#include "altrelay/rng.hpp"

#include <cmath>

namespace altrelay {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kMixA = 0xBF58476D1CE4E5B9ULL;
constexpr std::uint64_t kMixB = 0x94D049BB133111EBULL;

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * kMixA;
    z = (z ^ (z >> 27)) * kMixB;
    return z ^ (z >> 31);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0; // 2^-53

} // namespace

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream_id,
                               std::uint64_t purpose)
{
    std::uint64_t key = mix64(seed + kGamma);
    key = mix64(key ^ (stream_id + kMixA));
    state_ = mix64(key ^ (purpose + kMixB));
}

std::uint64_t GaussianStream::next_u64()
{
    state_ += kGamma;
    return mix64(state_);
}

double GaussianStream::uniform()
{
    return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double GaussianStream::normal()
{
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * kTwoPow53Inv;
    double u2 = static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

cplx GaussianStream::cnormal()
{
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * kTwoPow53Inv;
    double u2 = static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    // Scale by 1/sqrt(2) so the total variance per entry is one.
    const double inv_sqrt2 = 0.70710678118654752440;
    return cplx(r * std::cos(theta) * inv_sqrt2, r * std::sin(theta) * inv_sqrt2);
}

cmat GaussianStream::matrix(Eigen::Index rows, Eigen::Index cols)
{
    cmat out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            out(r, c) = cnormal();
    return out;
}

} // namespace altrelay
