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

#include "npds/api/http_client.hpp"

#include <httplib.h>

#include <mutex>

#include "npds/error.hpp"

namespace npds::api {

struct PdsClient::Impl {
  explicit Impl(const std::string& url) : client(url) {
    client.set_connection_timeout(5);
    client.set_read_timeout(60);
    client.set_write_timeout(60);
  }
  std::mutex mutex;
  httplib::Client client;
};

PdsClient::PdsClient(const std::string& server_url, std::string credential)
    : server_url_(server_url),
      credential_(std::move(credential)),
      impl_(std::make_unique<Impl>(server_url)) {
  if (!impl_->client.is_valid()) {
    throw Error(Errc::kInvalidArgument, "invalid server url '" + server_url + "'");
  }
}

PdsClient::~PdsClient() = default;
PdsClient::PdsClient(PdsClient&&) noexcept = default;
PdsClient& PdsClient::operator=(PdsClient&&) noexcept = default;

std::string PdsClient::request_bytes(const std::string& method, const std::string& path,
                                     const std::string& body,
                                     const std::string& content_type) {
  httplib::Headers headers;
  if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);
  httplib::Request req;
  req.method = method;
  req.path = path;
  req.headers = std::move(headers);
  if (!body.empty() || method == "POST" || method == "DELETE") {
    req.body = body;
    req.set_header("Content-Type", content_type);
  }
  httplib::Result result;
  {
    std::lock_guard guard(impl_->mutex);
    result = impl_->client.send(req);
  }
  if (!result) {
    throw Error(Errc::kInternal, method + " " + server_url_ + path + " failed: " +
                                     httplib::to_string(result.error()));
  }
  if (result->status >= 200 && result->status < 300) return result->body;
  Errc code = Errc::kInternal;
  std::string message = "HTTP " + std::to_string(result->status);
  try {
    const auto j = Json::parse(result->body);
    if (auto c = errc_from_name(j.at("error").get<std::string>())) code = *c;
    message = j.value("message", message);
  } catch (const Json::exception&) {
  }
  throw Error(code, message);
}

Json PdsClient::request_json(const std::string& method, const std::string& path,
                             const std::optional<Json>& body) {
  const auto text =
      request_bytes(method, path, body ? body->dump() : std::string(), "application/json");
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(Errc::kInternal, "unparseable response from " + path + ": " + e.what());
  }
}

std::string PdsClient::upload(std::span<const std::uint8_t> bytes) {
  const auto text = request_bytes("POST", "/v1/recordings",
                                  std::string(bytes.begin(), bytes.end()),
                                  "application/octet-stream");
  return Json::parse(text).at("recording_id").get<std::string>();
}

std::vector<qe::RecordingInfo> PdsClient::list_recordings() {
  std::vector<qe::RecordingInfo> out;
  const auto body = request_json("GET", "/v1/recordings");
  for (const auto& j : body.at("recordings")) {
    out.push_back(recording_info_from_json(j));
  }
  return out;
}

std::vector<std::uint8_t> PdsClient::export_all() {
  const auto text = request_bytes("GET", "/v1/recordings/export", {}, {});
  return {text.begin(), text.end()};
}

std::vector<std::uint8_t> PdsClient::raw(const std::string& recording_id) {
  const auto text = request_bytes("GET", "/v1/recordings/" + recording_id + "/raw", {}, {});
  return {text.begin(), text.end()};
}

std::size_t PdsClient::delete_recordings(const std::vector<std::string>& recording_ids) {
  return request_json("DELETE", "/v1/recordings", Json{{"recording_ids", recording_ids}})
      .at("deleted")
      .get<std::size_t>();
}

std::size_t PdsClient::delete_all() {
  return request_json("DELETE", "/v1/recordings", Json{{"all", true}})
      .at("deleted")
      .get<std::size_t>();
}

Grant PdsClient::request_grant(const std::string& client_id,
                               const std::set<std::string>& scopes) {
  return grant_from_json(
      request_json("POST", "/v1/grants", Json{{"client_id", client_id}, {"scopes", scopes}}));
}

std::vector<Grant> PdsClient::list_grants() {
  std::vector<Grant> out;
  const auto body = request_json("GET", "/v1/grants");
  for (const auto& j : body.at("grants")) {
    out.push_back(grant_from_json(j));
  }
  return out;
}

Json PdsClient::decide_grant(const std::string& grant_id, bool approve) {
  return request_json("POST", "/v1/grants/" + grant_id + "/decision",
                      Json{{"approve", approve}});
}

Grant PdsClient::revoke_grant(const std::string& grant_id) {
  return grant_from_json(request_json("DELETE", "/v1/grants/" + grant_id));
}

std::vector<qe::Question> PdsClient::list_questions() {
  std::vector<qe::Question> out;
  const auto body = request_json("GET", "/v1/questions");
  for (const auto& j : body.at("questions")) {
    out.push_back(qe::question_from_json(j));
  }
  return out;
}

Json PdsClient::install_question(const qe::Question& q) {
  return request_json("POST", "/v1/questions", qe::to_json(q));
}

Json PdsClient::answers(const std::string& question_id, const qe::AnswerFilter& filter) {
  httplib::Params params;
  if (filter.from_micros) params.emplace("from", std::to_string(*filter.from_micros));
  if (filter.to_micros) params.emplace("to", std::to_string(*filter.to_micros));
  if (filter.subject_ids) {
    std::string list;
    for (const auto& id : *filter.subject_ids) list += (list.empty() ? "" : ",") + id;
    params.emplace("subject", list);
  }
  return request_json("GET", httplib::append_query_params("/v1/answers/" + question_id, params));
}

Json PdsClient::run_compute() { return request_json("POST", "/v1/compute/run"); }

std::vector<AuditEntry> PdsClient::audit(std::int64_t since_seq) {
  std::vector<AuditEntry> out;
  const auto body = request_json("GET", "/v1/audit?since=" + std::to_string(since_seq));
  for (const auto& j : body.at("entries")) {
    out.push_back(audit_entry_from_json(j));
  }
  return out;
}

void PdsClient::provision(const Provisioning& p) {
  request_json("POST", "/v1/aggregate/provision", to_json(p));
}

void PdsClient::open_session(const agg::SessionAnnouncement& a) {
  request_json("POST", "/v1/aggregate/sessions", to_json(a));
}

agg::MaskedShare PdsClient::contribute(const std::string& session_id) {
  return share_from_json(
      request_json("POST", "/v1/aggregate/sessions/" + session_id + "/contribute"));
}

HttpParticipantChannel::HttpParticipantChannel(std::string participant_id,
                                               const std::string& server_url,
                                               std::string token)
    : participant_id_(std::move(participant_id)), client_(server_url, std::move(token)) {}

void HttpParticipantChannel::open(const agg::SessionAnnouncement& announcement) {
  client_.open_session(announcement);
}

agg::MaskedShare HttpParticipantChannel::contribute(const std::string& session_id) {
  auto share = client_.contribute(session_id);
  if (share.participant_id != participant_id_) {
    throw Error(Errc::kSessionMismatch, "share from " + share.participant_id + ", expected " +
                                            participant_id_);
  }
  return share;
}

}  // namespace npds::api
