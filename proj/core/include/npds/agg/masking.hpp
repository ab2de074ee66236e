/*
 * Copyright 2026 The npds Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NPDS_AGG_MASKING_HPP_
#define NPDS_AGG_MASKING_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace npds::agg {

// Secret shared by one pair of participants, provisioned out of band.
using PairSeed = std::array<std::uint8_t, 32>;

PairSeed random_pair_seed();
std::string to_hex(std::span<const std::uint8_t> bytes);
// Throws Errc::kInvalidArgument on malformed hex or wrong length.
PairSeed pair_seed_from_hex(std::string_view hex);

// s_ij: keyed BLAKE2b over (session_id, min(i, j), max(i, j)), truncated to
// 64 bits. Symmetric in (i, j). Throws Errc::kInvalidArgument when i == j.
std::uint64_t derive_pairwise_mask(const PairSeed& seed, std::string_view session_id,
                                   std::uint32_t i, std::uint32_t j);

// encoded + sum_{j != self} sign(self, j) * s_{self,j} (mod 2^64), where
// sign = +1 when self < j and -1 otherwise. `seeds` holds one seed per peer
// index in [0, n) \ {self}.
std::uint64_t apply_pairwise_masks(std::uint64_t encoded, std::string_view session_id,
                                   std::uint32_t self, std::uint32_t n,
                                   const std::map<std::uint32_t, PairSeed>& seeds);

// Hex BLAKE2b-256 commitment to (session_id, participant list). The list is
// canonicalized (sorted) first.
std::string participants_hash(std::string_view session_id,
                              std::vector<std::string> participants);

}  // namespace npds::agg

#endif  // NPDS_AGG_MASKING_HPP_
