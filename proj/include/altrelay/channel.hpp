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

#include <vector>

#include "altrelay/linalg.hpp"
#include "altrelay/rng.hpp"

namespace altrelay {

// How the channel evolves over the slot sequence.
//   SlowFading       - one realization for the whole run
//   BlockPerTwoSlots - constant over slot pairs (n, n+1) with n even, and the
//                      inter-relay links are reciprocal within the pair:
//                      H_31 = H_13^T, H_32 = H_23^T
//   BlockPerSlot     - independent realization every slot
enum class FadingScenario {
    SlowFading,
    BlockPerTwoSlots,
    BlockPerSlot,
};

// One realization of every link for one time slot. H_iS are the backward
// (source to relay) channels, H_Di the forward (relay to destination)
// channels, and H_ij the inter-relay channels from relay j to relay i.
// The direct source-destination link is assumed negligible and never drawn.
struct ChannelSet {
    cmat H_1S, H_2S, H_3S;
    cmat H_D1, H_D2, H_D3;
    cmat H_13, H_23, H_31, H_32;
    int slot_index = 0;
};

// Draws a slot-indexed channel sequence obeying the scenario's constancy and
// reciprocity rules. All entries are i.i.d. CN(0,1) at each redraw. Slot 0 is
// even (source feeds relays 1 and 2 while relay 3 forwards).
std::vector<ChannelSet> draw_channel_sequence(FadingScenario scenario, int M,
                                              int n_slots, GaussianStream& rng);

// True when the inter-relay links of `ch` satisfy H_31 = H_13^T and
// H_32 = H_23^T exactly.
bool has_interrelay_reciprocity(const ChannelSet& ch);

} // namespace altrelay
