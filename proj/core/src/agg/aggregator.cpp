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

#include "npds/agg/aggregator.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "npds/agg/masking.hpp"
#include "npds/error.hpp"

namespace npds::agg {

std::string_view session_state_name(SessionState state) {
  switch (state) {
    case SessionState::kCreated: return "CREATED";
    case SessionState::kCollecting: return "COLLECTING";
    case SessionState::kDone: return "DONE";
    case SessionState::kFailed: return "FAILED";
  }
  return "FAILED";
}

SessionAnnouncement AggregationSession::announcement() const {
  return SessionAnnouncement{session_id, question_id, field,
                             participants_hash(session_id, participants), kFixedPointScale};
}

std::uint32_t AggregationSession::index_of(std::string_view participant_id) const {
  auto it = std::lower_bound(participants.begin(), participants.end(), participant_id);
  if (it == participants.end() || *it != participant_id) {
    throw Error(Errc::kInvalidArgument,
                "'" + std::string(participant_id) + "' is not in session " + session_id);
  }
  return static_cast<std::uint32_t>(it - participants.begin());
}

AggregationSession make_session(std::string session_id, std::string question_id,
                                std::string field, std::vector<std::string> participants) {
  if (participants.size() < kMinGroupSize) {
    throw Error(Errc::kMinimumGroupSize,
                "aggregation needs at least " + std::to_string(kMinGroupSize) +
                    " participants, got " + std::to_string(participants.size()));
  }
  std::sort(participants.begin(), participants.end());
  if (std::adjacent_find(participants.begin(), participants.end()) != participants.end()) {
    throw Error(Errc::kInvalidArgument, "participant listed twice");
  }
  if (session_id.empty() || question_id.empty() || field.empty()) {
    throw Error(Errc::kInvalidArgument, "session id, question id and field are required");
  }
  return AggregationSession{std::move(session_id), std::move(question_id), std::move(field),
                            std::move(participants), SessionState::kCreated};
}

std::uint64_t sum_shares(std::span<const MaskedShare> shares) {
  std::uint64_t total = 0;
  for (const auto& s : shares) total += s.value;
  return total;
}

AggregateResult aggregate(const AggregationSession& session,
                          std::span<const MaskedShare> shares) {
  const std::size_t n = session.participants.size();
  if (n < kMinGroupSize || shares.size() < kMinGroupSize) {
    throw Error(Errc::kMinimumGroupSize, "fewer than " + std::to_string(kMinGroupSize) +
                                             " participants");
  }
  std::set<std::string> seen;
  for (const auto& share : shares) {
    session.index_of(share.participant_id);
    if (!seen.insert(share.participant_id).second) {
      throw Error(Errc::kDuplicateShare, "two shares from " + share.participant_id);
    }
  }
  if (seen.size() != n) {
    throw Error(Errc::kMissingShare, std::to_string(n - seen.size()) +
                                         " participant(s) did not contribute");
  }
  AggregateResult result;
  result.n = n;
  result.sum = decode_fixed(sum_shares(shares), n);
  result.mean = result.sum / static_cast<double>(n);
  return result;
}

AggregateResult run_session(AggregationSession& session,
                            std::span<ParticipantChannel* const> channels) {
  try {
    if (channels.size() != session.participants.size()) {
      throw Error(Errc::kMissingShare, "channel count differs from participant count");
    }
    const auto announcement = session.announcement();
    session.state = SessionState::kCollecting;
    std::vector<std::future<MaskedShare>> pending;
    pending.reserve(channels.size());
    for (auto* channel : channels) {
      pending.push_back(std::async(std::launch::async, [channel, &announcement] {
        channel->open(announcement);
        return channel->contribute(announcement.session_id);
      }));
    }
    std::vector<MaskedShare> shares;
    std::exception_ptr first_error;
    for (auto& f : pending) {
      try {
        shares.push_back(f.get());
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
    auto result = aggregate(session, shares);
    session.state = SessionState::kDone;
    return result;
  } catch (...) {
    session.state = SessionState::kFailed;
    throw;
  }
}

}  // namespace npds::agg
