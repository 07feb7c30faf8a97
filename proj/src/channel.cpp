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

#include "altrelay/channel.hpp"

namespace altrelay {

namespace {

// Fixed draw order; changing it would silently re-map every seeded
// experiment, so it is part of the reproducibility contract.
ChannelSet draw_one(int M, GaussianStream& rng, bool reciprocal)
{
    ChannelSet ch;
    ch.H_1S = rng.matrix(M, M);
    ch.H_2S = rng.matrix(M, M);
    ch.H_3S = rng.matrix(M, M);
    ch.H_D1 = rng.matrix(M, M);
    ch.H_D2 = rng.matrix(M, M);
    ch.H_D3 = rng.matrix(M, M);
    ch.H_13 = rng.matrix(M, M);
    ch.H_23 = rng.matrix(M, M);
    if (reciprocal) {
        ch.H_31 = ch.H_13.transpose();
        ch.H_32 = ch.H_23.transpose();
    } else {
        ch.H_31 = rng.matrix(M, M);
        ch.H_32 = rng.matrix(M, M);
    }
    return ch;
}

} // namespace

std::vector<ChannelSet> draw_channel_sequence(FadingScenario scenario, int M,
                                              int n_slots, GaussianStream& rng)
{
    if (M < 2 || M % 2 != 0)
        throw InvalidDimension("draw_channel_sequence: M must be even and >= 2");
    if (n_slots < 1)
        throw InvalidDimension("draw_channel_sequence: n_slots must be >= 1");

    std::vector<ChannelSet> seq;
    seq.reserve(static_cast<std::size_t>(n_slots));

    switch (scenario) {
    case FadingScenario::SlowFading: {
        ChannelSet base = draw_one(M, rng, false);
        for (int n = 0; n < n_slots; ++n) {
            seq.push_back(base);
            seq.back().slot_index = n;
        }
        break;
    }
    case FadingScenario::BlockPerTwoSlots: {
        for (int n = 0; n < n_slots; n += 2) {
            ChannelSet block = draw_one(M, rng, true);
            block.slot_index = n;
            seq.push_back(block);
            if (n + 1 < n_slots) {
                seq.push_back(block);
                seq.back().slot_index = n + 1;
            }
        }
        break;
    }
    case FadingScenario::BlockPerSlot: {
        for (int n = 0; n < n_slots; ++n) {
            seq.push_back(draw_one(M, rng, false));
            seq.back().slot_index = n;
        }
        break;
    }
    }
    return seq;
}

bool has_interrelay_reciprocity(const ChannelSet& ch)
{
    return ch.H_31 == ch.H_13.transpose() && ch.H_32 == ch.H_23.transpose();
}

} // namespace altrelay
