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

#include "npds/api/wire.hpp"

#include <charconv>

#include "npds/error.hpp"

namespace npds::api {

Json to_json(const qe::RecordingInfo& info) {
  Json j{{"recording_id", info.recording_id},
         {"start", info.start_micros},
         {"end", info.end_micros},
         {"channel_count", info.channel_count},
         {"sample_count", info.sample_count},
         {"sample_rate_hz", info.sample_rate_hz},
         {"uploaded_at", info.uploaded_at_micros}};
  j["location"] = info.location ? Json{{"lat", info.location->latitude_deg},
                                       {"lon", info.location->longitude_deg}}
                                : Json(nullptr);
  return j;
}

qe::RecordingInfo recording_info_from_json(const Json& j) {
  qe::RecordingInfo info;
  info.recording_id = j.at("recording_id").get<std::string>();
  info.start_micros = j.at("start").get<std::int64_t>();
  info.end_micros = j.at("end").get<std::int64_t>();
  info.channel_count = j.at("channel_count").get<std::size_t>();
  info.sample_count = j.at("sample_count").get<std::size_t>();
  info.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  info.uploaded_at_micros = j.at("uploaded_at").get<std::int64_t>();
  if (!j.at("location").is_null()) {
    info.location = eeg::GeoLocation{j["location"].at("lat").get<double>(),
                                     j["location"].at("lon").get<double>()};
  }
  return info;
}

Json to_json(const qe::InstallResult& result) {
  return {{"question", qe::to_json(result.question)},
          {"version_changed", result.version_changed},
          {"jobs_enqueued", result.jobs_enqueued}};
}

Json to_json(const AnswerPage& page) {
  Json answers = Json::array();
  for (const auto& a : page.answers) answers.push_back(qe::to_json(a));
  return {{"question_id", page.question.question_id},
          {"version", page.question.version},
          {"answers", answers}};
}

Json to_json(const GrantStore::Decision& decision) {
  Json j{{"grant", to_json(decision.grant)}};
  if (decision.token) {
    j["access_token"] = decision.token->token;
    j["expires_at"] = decision.token->expires_at_micros;
  }
  return j;
}

Grant grant_from_json(const Json& j) {
  Grant g;
  g.grant_id = j.at("grant_id").get<std::string>();
  g.client_id = j.at("client_id").get<std::string>();
  g.scopes = j.at("scopes").get<std::set<std::string>>();
  const auto state = j.at("state").get<std::string>();
  g.state = state == "PENDING"  ? GrantState::kPending
            : state == "ACTIVE" ? GrantState::kActive
                                : GrantState::kRevoked;
  g.created_at_micros = j.at("created_at").get<std::int64_t>();
  if (!j.at("decided_at").is_null()) g.decided_at_micros = j["decided_at"].get<std::int64_t>();
  return g;
}

std::uint64_t u64_from_json(const Json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
  }
  throw Error(Errc::kInvalidRequest, "expected an unsigned 64-bit value, got " + j.dump());
}

Json to_json(const agg::SessionAnnouncement& a) {
  return {{"session_id", a.session_id},
          {"question_id", a.question_id},
          {"field", a.field},
          {"participants_hash", a.participants_hash},
          {"scale", std::to_string(a.scale)}};
}

agg::SessionAnnouncement announcement_from_json(const Json& j) {
  agg::SessionAnnouncement a;
  a.session_id = j.at("session_id").get<std::string>();
  a.question_id = j.at("question_id").get<std::string>();
  a.field = j.at("field").get<std::string>();
  a.participants_hash = j.at("participants_hash").get<std::string>();
  if (j.contains("scale")) a.scale = u64_from_json(j["scale"]);
  return a;
}

Json to_json(const agg::MaskedShare& share) {
  return {{"participant_id", share.participant_id}, {"value", std::to_string(share.value)}};
}

agg::MaskedShare share_from_json(const Json& j) {
  return {j.at("participant_id").get<std::string>(), u64_from_json(j.at("value"))};
}

}  // namespace npds::api
