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

#ifndef NPDS_AGG_AGGREGATOR_HPP_
#define NPDS_AGG_AGGREGATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "npds/agg/fixed_point.hpp"

namespace npds::agg {

inline constexpr std::size_t kMinGroupSize = 3;

enum class SessionState { kCreated, kCollecting, kDone, kFailed };

std::string_view session_state_name(SessionState state);

struct MaskedShare {
  std::string participant_id;
  std::uint64_t value = 0;

  bool operator==(const MaskedShare&) const = default;
};

// What the aggregator sends each participant when opening a session.
struct SessionAnnouncement {
  std::string session_id;
  std::string question_id;
  // Key path inside the answer payload, dot-separated ("ratio").
  std::string field;
  std::string participants_hash;
  std::uint64_t scale = kFixedPointScale;
};

struct AggregationSession {
  std::string session_id;
  std::string question_id;
  std::string field;
  // Sorted, unique. A participant's index is its position here.
  std::vector<std::string> participants;
  SessionState state = SessionState::kCreated;

  SessionAnnouncement announcement() const;
  // Throws Errc::kInvalidArgument for ids outside the session.
  std::uint32_t index_of(std::string_view participant_id) const;
};

// Canonicalizes the participant list. Throws Errc::kMinimumGroupSize and
// Errc::kInvalidArgument (duplicate participants).
AggregationSession make_session(std::string session_id, std::string question_id,
                                std::string field, std::vector<std::string> participants);

struct AggregateResult {
  double sum = 0.0;
  double mean = 0.0;
  std::size_t n = 0;
};

// Plain modular sum; no completeness checks.
std::uint64_t sum_shares(std::span<const MaskedShare> shares);

// Requires exactly one share from every participant. Throws
// Errc::kMinimumGroupSize, Errc::kDuplicateShare, Errc::kMissingShare.
AggregateResult aggregate(const AggregationSession& session,
                          std::span<const MaskedShare> shares);

// Transport to one participating PDS.
class ParticipantChannel {
 public:
  virtual ~ParticipantChannel() = default;
  virtual std::string participant_id() const = 0;
  virtual void open(const SessionAnnouncement& announcement) = 0;
  virtual MaskedShare contribute(const std::string& session_id) = 0;
};

// Announces the session to every participant, collects shares concurrently
// and aggregates. Moves the session to DONE, or FAILED before rethrowing the
// first participant error.
AggregateResult run_session(AggregationSession& session,
                            std::span<ParticipantChannel* const> channels);

}  // namespace npds::agg

#endif  // NPDS_AGG_AGGREGATOR_HPP_
