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

#ifndef NPDS_API_HTTP_CLIENT_HPP_
#define NPDS_API_HTTP_CLIENT_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "npds/agg/aggregator.hpp"
#include "npds/api/wire.hpp"

namespace npds::api {

// Typed client for the PDS HTTP API. API errors are rethrown as npds::Error
// carrying the server's error code; transport failures as Errc::kInternal.
class PdsClient {
 public:
  // `server_url` is "http://host:port". `credential` is sent as a bearer
  // token when non-empty.
  PdsClient(const std::string& server_url, std::string credential);
  ~PdsClient();
  PdsClient(PdsClient&&) noexcept;
  PdsClient& operator=(PdsClient&&) noexcept;

  const std::string& server_url() const { return server_url_; }

  std::string upload(std::span<const std::uint8_t> bytes);
  std::vector<qe::RecordingInfo> list_recordings();
  std::vector<std::uint8_t> export_all();
  std::vector<std::uint8_t> raw(const std::string& recording_id);
  std::size_t delete_recordings(const std::vector<std::string>& recording_ids);
  std::size_t delete_all();

  Grant request_grant(const std::string& client_id, const std::set<std::string>& scopes);
  std::vector<Grant> list_grants();
  // The raw {grant, access_token?, expires_at?} document.
  Json decide_grant(const std::string& grant_id, bool approve);
  Grant revoke_grant(const std::string& grant_id);

  std::vector<qe::Question> list_questions();
  Json install_question(const qe::Question& q);
  // The raw {question_id, version, answers} document.
  Json answers(const std::string& question_id, const qe::AnswerFilter& filter = {});
  // The raw {jobs, count} document.
  Json run_compute();
  std::vector<AuditEntry> audit(std::int64_t since_seq = 0);

  void provision(const Provisioning& p);
  void open_session(const agg::SessionAnnouncement& a);
  agg::MaskedShare contribute(const std::string& session_id);

  // Low-level access; returns the parsed body of a 2xx response.
  Json request_json(const std::string& method, const std::string& path,
                    const std::optional<Json>& body = std::nullopt);

 private:
  std::string request_bytes(const std::string& method, const std::string& path,
                            const std::string& body, const std::string& content_type);

  struct Impl;
  std::string server_url_;
  std::string credential_;
  std::unique_ptr<Impl> impl_;
};

// A participant reached over HTTP with an aggregator token.
class HttpParticipantChannel : public agg::ParticipantChannel {
 public:
  HttpParticipantChannel(std::string participant_id, const std::string& server_url,
                         std::string token);

  std::string participant_id() const override { return participant_id_; }
  void open(const agg::SessionAnnouncement& announcement) override;
  agg::MaskedShare contribute(const std::string& session_id) override;

 private:
  std::string participant_id_;
  PdsClient client_;
};

}  // namespace npds::api

#endif  // NPDS_API_HTTP_CLIENT_HPP_
