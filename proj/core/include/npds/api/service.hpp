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

#ifndef NPDS_API_SERVICE_HPP_
#define NPDS_API_SERVICE_HPP_

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "npds/agg/aggregator.hpp"
#include "npds/api/audit.hpp"
#include "npds/api/config.hpp"
#include "npds/api/grants.hpp"
#include "npds/api/participant.hpp"
#include "npds/error.hpp"
#include "npds/qe/engine.hpp"
#include "npds/qe/stores.hpp"
#include "npds/sql/database.hpp"

namespace npds::api {

// Microseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;
std::int64_t system_now_micros();

// Client id recorded for requests made with the owner credential.
inline constexpr std::string_view kOwnerClientId = "owner";
// Client id recorded for requests without a usable credential.
inline constexpr std::string_view kAnonymousClientId = "anonymous";

struct DeleteSelector {
  bool all = false;
  std::vector<std::string> recording_ids;
};

struct AnswerPage {
  qe::Question question;
  std::vector<qe::Answer> answers;
};

// One PDS: stores, question engine, grants and the audit log behind a single
// request surface. `bearer` is the raw credential from the request (owner
// credential, access token, or empty). Every public request method appends
// exactly one audit entry, whether it succeeds or throws.
class PdsService {
 public:
  explicit PdsService(PdsConfig config, Clock clock = system_now_micros);
  ~PdsService();
  PdsService(const PdsService&) = delete;
  PdsService& operator=(const PdsService&) = delete;

  // Scope upload. Throws Errc::kBadRecording for unparseable bytes.
  std::string upload_recording(std::string_view bearer, std::span<const std::uint8_t> bytes);
  // Owner only. Metadata of stored recordings.
  std::vector<qe::RecordingInfo> list_recordings(std::string_view bearer);
  // Scope owner:export. Stored files concatenated in list order.
  std::vector<std::uint8_t> owner_export(std::string_view bearer);
  // Scope owner:export.
  std::vector<std::uint8_t> raw_recording(std::string_view bearer,
                                          const std::string& recording_id);
  // Scope owner:delete. Returns the number of recordings removed.
  std::size_t owner_delete(std::string_view bearer, const DeleteSelector& selector);

  // Unauthenticated. Scopes must be registered question scopes or reserved.
  Grant request_grant(std::string_view bearer, const std::string& client_id,
                      std::set<std::string> scopes);
  // Owner only.
  std::vector<Grant> list_grants(std::string_view bearer);
  GrantStore::Decision decide_grant(std::string_view bearer, const std::string& grant_id,
                                    bool approve);
  Grant revoke_grant(std::string_view bearer, const std::string& grant_id);

  // Any valid credential.
  std::vector<qe::Question> list_questions(std::string_view bearer);
  // Owner only.
  qe::InstallResult install_question(std::string_view bearer, qe::Question question);
  // Requires the question's required_scope.
  AnswerPage serve_answer(std::string_view bearer, const std::string& question_id,
                          const qe::AnswerFilter& filter);
  // Owner only. Manual scheduler sweep.
  std::vector<qe::ComputationJob> run_compute(std::string_view bearer);

  // Owner only. Entries after `since_seq`.
  std::vector<AuditEntry> audit_query(std::string_view bearer, std::int64_t since_seq);

  // Owner only.
  void provision_aggregation(std::string_view bearer, const Provisioning& provisioning);
  // Scope aggregate:participate (Errc::kNotAuthorized otherwise).
  void open_aggregation(std::string_view bearer, const agg::SessionAnnouncement& announcement);
  agg::MaskedShare contribute(std::string_view bearer, const std::string& session_id);

  // Audits a request rejected before reaching an operation (unknown route,
  // malformed body) and returns the error to report.
  Error reject_request(std::string_view bearer, const std::string& endpoint, Error error);

  // Unaudited internals for the scheduler thread and in-process tooling.
  std::vector<qe::ComputationJob> scheduled_sweep();
  qe::QuestionEngine& engine() { return *engine_; }
  AuditLog& audit_log() { return *audit_; }
  const PdsConfig& config() const { return config_; }
  std::int64_t now() const { return clock_(); }

 private:
  enum class CallerKind { kAnonymous, kInvalid, kOwner, kClient };
  struct Caller {
    CallerKind kind = CallerKind::kAnonymous;
    std::string client_id{kAnonymousClientId};
    std::optional<TokenLookup> token;
  };
  struct Request {
    std::string endpoint;
    std::int64_t timestamp_micros = 0;
    Caller caller;
    std::string scope_used;
    std::vector<std::string> subject_ids;
  };

  template <typename F>
  auto handle(std::string endpoint, std::string_view bearer, F&& body);
  Caller identify(std::string_view bearer, std::int64_t now);
  void require_owner(Request& req);
  void require_valid(Request& req);
  // Owner credential, or a token whose grant carries `scope`.
  void require_scope(Request& req, std::string_view scope,
                     Errc missing_scope = Errc::kScopeDenied);
  void write_audit(Request& req, Outcome outcome, std::optional<std::string> error);
  LocalValue local_value(const std::string& question_id, const std::string& field);

  PdsConfig config_;
  Clock clock_;
  std::unique_ptr<sql::Database> db_;
  std::unique_ptr<AuditLog> audit_;
  std::unique_ptr<GrantStore> grants_;
  std::unique_ptr<qe::RecordingStore> recordings_;
  std::unique_ptr<qe::AnswerStore> answers_;
  std::unique_ptr<qe::QuestionEngine> engine_;
  std::unique_ptr<ParticipantStore> participant_;
};

// Runs PdsService::scheduled_sweep every schedule_tick_seconds until
// destroyed.
class Scheduler {
 public:
  explicit Scheduler(PdsService& service);
  ~Scheduler();
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  void stop();

 private:
  PdsService& service_;
  std::mutex mutex_;
  std::condition_variable wake_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace npds::api

#endif  // NPDS_API_SERVICE_HPP_
