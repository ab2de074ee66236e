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

#include "npds/api/service.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <type_traits>

#include "npds/eeg/format.hpp"
#include "npds/error.hpp"
#include "npds/scopes.hpp"

namespace npds::api {
namespace {

std::array<unsigned char, 32> digest(std::string_view s) {
  std::array<unsigned char, 32> out{};
  crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(s.data()),
                     s.size(), nullptr, 0);
  return out;
}

std::unique_ptr<sql::Database> open_database(const PdsConfig& config) {
  if (config.storage != ":memory:") std::filesystem::create_directories(config.storage);
  return std::make_unique<sql::Database>(config.database_path());
}

const qe::Json* find_field(const qe::Json& payload, const std::string& path) {
  const qe::Json* node = &payload;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const auto key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &node->at(key);
    if (dot == std::string::npos) return node;
    begin = dot + 1;
  }
}

}  // namespace

std::int64_t system_now_micros() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

PdsService::PdsService(PdsConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
  if (sodium_init() < 0) throw Error(Errc::kInternal, "libsodium failed to initialize");
  if (config_.owner_credential.size() < kMinOwnerCredentialLength) {
    throw Error(Errc::kInvalidArgument, "owner credential too short");
  }
  db_ = open_database(config_);
  audit_ = std::make_unique<AuditLog>(*db_);
  grants_ = std::make_unique<GrantStore>(*db_);
  recordings_ = std::make_unique<qe::RecordingStore>(*db_);
  answers_ = std::make_unique<qe::AnswerStore>(*db_);
  engine_ = std::make_unique<qe::QuestionEngine>(*db_, *recordings_, *answers_);
  participant_ = std::make_unique<ParticipantStore>(*db_);
}

PdsService::~PdsService() = default;

template <typename F>
auto PdsService::handle(std::string endpoint, std::string_view bearer, F&& body) {
  Request req;
  req.endpoint = std::move(endpoint);
  req.timestamp_micros = clock_();
  req.caller = identify(bearer, req.timestamp_micros);
  try {
    if constexpr (std::is_void_v<std::invoke_result_t<F, Request&>>) {
      body(req);
      write_audit(req, Outcome::kAllowed, std::nullopt);
    } else {
      auto result = body(req);
      write_audit(req, Outcome::kAllowed, std::nullopt);
      return result;
    }
  } catch (const Error& e) {
    write_audit(req, Outcome::kDenied, std::string(e.code_name()));
    throw;
  } catch (const std::exception& e) {
    write_audit(req, Outcome::kDenied, std::string(errc_name(Errc::kInternal)));
    throw Error(Errc::kInternal, e.what());
  }
}

PdsService::Caller PdsService::identify(std::string_view bearer, std::int64_t now) {
  Caller caller;
  if (bearer.empty()) return caller;
  const auto given = digest(bearer);
  const auto owner = digest(config_.owner_credential);
  if (sodium_memcmp(given.data(), owner.data(), given.size()) == 0) {
    caller.kind = CallerKind::kOwner;
    caller.client_id = kOwnerClientId;
    return caller;
  }
  caller.kind = CallerKind::kInvalid;
  if (auto lookup = grants_->resolve(bearer)) {
    caller.client_id = lookup->grant.client_id;
    if (lookup->usable_at(now)) caller.kind = CallerKind::kClient;
    caller.token = std::move(lookup);
  }
  return caller;
}

void PdsService::require_valid(Request& req) {
  switch (req.caller.kind) {
    case CallerKind::kOwner:
    case CallerKind::kClient:
      return;
    case CallerKind::kAnonymous:
      throw Error(Errc::kUnauthorized, "missing bearer credential");
    case CallerKind::kInvalid:
      if (req.caller.token && req.caller.token->grant.state == GrantState::kRevoked) {
        throw Error(Errc::kUnauthorized, "grant revoked");
      }
      if (req.caller.token && req.caller.token->grant.state == GrantState::kActive) {
        throw Error(Errc::kUnauthorized, "token expired");
      }
      throw Error(Errc::kUnauthorized, "invalid token");
  }
}

void PdsService::require_owner(Request& req) {
  req.scope_used = kOwnerClientId;
  require_valid(req);
  if (req.caller.kind != CallerKind::kOwner) {
    throw Error(Errc::kScopeDenied, "owner credential required");
  }
}

void PdsService::require_scope(Request& req, std::string_view scope, Errc missing_scope) {
  req.scope_used = scope;
  require_valid(req);
  if (req.caller.kind == CallerKind::kOwner) return;
  if (!req.caller.token->grant.scopes.contains(std::string(scope))) {
    throw Error(missing_scope, "grant lacks scope " + std::string(scope));
  }
}

void PdsService::write_audit(Request& req, Outcome outcome, std::optional<std::string> error) {
  AuditEntry entry;
  entry.timestamp_micros = req.timestamp_micros;
  entry.client_id = req.caller.client_id;
  entry.endpoint = req.endpoint;
  entry.scope_used = req.scope_used;
  entry.subject_ids = req.subject_ids;
  entry.outcome = outcome;
  entry.error = std::move(error);
  audit_->append(std::move(entry));
}

std::string PdsService::upload_recording(std::string_view bearer,
                                         std::span<const std::uint8_t> bytes) {
  return handle("POST /v1/recordings", bearer, [&](Request& req) {
    require_scope(req, scopes::kUpload);
    std::optional<eeg::EegRecording> rec;
    try {
      rec = eeg::parse_recording(bytes);
    } catch (const Error& e) {
      throw Error(Errc::kBadRecording, std::string(e.code_name()) + ": " + e.what());
    }
    const auto id = rec->recording_id();
    req.subject_ids = {id};
    sql::Transaction tx(*db_);
    if (!recordings_->insert(*rec, bytes, req.timestamp_micros)) {
      const auto stored = recordings_->bytes(id);
      if (!stored || !std::equal(stored->begin(), stored->end(), bytes.begin(), bytes.end())) {
        throw Error(Errc::kBadRecording, "recording id " + id + " already holds other data");
      }
      return id;
    }
    engine_->on_recording_added(id);
    tx.commit();
    return id;
  });
}

std::vector<qe::RecordingInfo> PdsService::list_recordings(std::string_view bearer) {
  return handle("GET /v1/recordings", bearer, [&](Request& req) {
    require_owner(req);
    auto infos = recordings_->list();
    for (const auto& info : infos) req.subject_ids.push_back(info.recording_id);
    return infos;
  });
}

std::vector<std::uint8_t> PdsService::owner_export(std::string_view bearer) {
  return handle("GET /v1/recordings/export", bearer, [&](Request& req) {
    require_scope(req, scopes::kOwnerExport);
    auto lock = db_->lock();
    std::vector<std::uint8_t> out;
    for (const auto& info : recordings_->list()) {
      const auto bytes = recordings_->bytes(info.recording_id);
      if (!bytes) continue;
      out.insert(out.end(), bytes->begin(), bytes->end());
      req.subject_ids.push_back(info.recording_id);
    }
    return out;
  });
}

std::vector<std::uint8_t> PdsService::raw_recording(std::string_view bearer,
                                                    const std::string& recording_id) {
  return handle("GET /v1/recordings/{id}/raw", bearer, [&](Request& req) {
    require_scope(req, scopes::kOwnerExport);
    auto bytes = recordings_->bytes(recording_id);
    if (!bytes) throw Error(Errc::kUnknownRecording, "no recording " + recording_id);
    req.subject_ids = {recording_id};
    return std::move(*bytes);
  });
}

std::size_t PdsService::owner_delete(std::string_view bearer, const DeleteSelector& selector) {
  return handle("DELETE /v1/recordings", bearer, [&](Request& req) {
    require_scope(req, scopes::kOwnerDelete);
    sql::Transaction tx(*db_);
    std::vector<std::string> ids;
    if (selector.all) {
      for (const auto& info : recordings_->list()) ids.push_back(info.recording_id);
    } else {
      for (const auto& id : selector.recording_ids) {
        if (!recordings_->contains(id)) throw Error(Errc::kUnknownRecording, "no recording " + id);
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
      }
    }
    req.subject_ids = ids;
    if (ids.empty()) return std::size_t{0};
    engine_->on_recordings_deleted(ids);
    participant_->forget_sources(ids);
    const auto removed = recordings_->remove(ids);
    tx.commit();
    return removed;
  });
}

Grant PdsService::request_grant(std::string_view bearer, const std::string& client_id,
                                std::set<std::string> scopes) {
  return handle("POST /v1/grants", bearer, [&](Request& req) {
    if (req.caller.kind == CallerKind::kAnonymous) req.caller.client_id = client_id;
    if (client_id.empty() || client_id == kOwnerClientId || client_id == kAnonymousClientId) {
      throw Error(Errc::kInvalidRequest, "invalid client_id '" + client_id + "'");
    }
    if (scopes.empty()) throw Error(Errc::kInvalidScope, "no scopes requested");
    const auto known = engine_->question_scopes();
    for (const auto& s : scopes) {
      if (!known.contains(s) && !scopes::is_reserved(s)) {
        throw Error(Errc::kInvalidScope, "unknown scope " + s);
      }
    }
    return grants_->create(client_id, std::move(scopes), req.timestamp_micros);
  });
}

std::vector<Grant> PdsService::list_grants(std::string_view bearer) {
  return handle("GET /v1/grants", bearer, [&](Request& req) {
    require_owner(req);
    return grants_->list();
  });
}

GrantStore::Decision PdsService::decide_grant(std::string_view bearer,
                                              const std::string& grant_id, bool approve) {
  return handle("POST /v1/grants/{id}/decision", bearer, [&](Request& req) {
    require_owner(req);
    return grants_->decide(grant_id, approve, req.timestamp_micros, config_.token_ttl_seconds);
  });
}

Grant PdsService::revoke_grant(std::string_view bearer, const std::string& grant_id) {
  return handle("DELETE /v1/grants/{id}", bearer, [&](Request& req) {
    require_owner(req);
    return grants_->revoke(grant_id, req.timestamp_micros);
  });
}

std::vector<qe::Question> PdsService::list_questions(std::string_view bearer) {
  return handle("GET /v1/questions", bearer, [&](Request& req) {
    require_valid(req);
    return engine_->list_questions();
  });
}

qe::InstallResult PdsService::install_question(std::string_view bearer, qe::Question question) {
  return handle("POST /v1/questions", bearer, [&](Request& req) {
    require_owner(req);
    return engine_->install_question(std::move(question));
  });
}

AnswerPage PdsService::serve_answer(std::string_view bearer, const std::string& question_id,
                                    const qe::AnswerFilter& filter) {
  return handle("GET /v1/answers/{question_id}", bearer, [&](Request& req) {
    require_valid(req);
    auto question = engine_->find_question(question_id);
    if (!question) throw Error(Errc::kUnknownQuestion, "no question " + question_id);
    require_scope(req, question->required_scope);
    AnswerPage page{std::move(*question), engine_->get_answers(question_id, filter)};
    for (const auto& a : page.answers) req.subject_ids.push_back(a.subject.id);
    return page;
  });
}

std::vector<qe::ComputationJob> PdsService::run_compute(std::string_view bearer) {
  return handle("POST /v1/compute/run", bearer, [&](Request& req) {
    require_owner(req);
    return engine_->run_due_jobs(req.timestamp_micros);
  });
}

std::vector<AuditEntry> PdsService::audit_query(std::string_view bearer, std::int64_t since_seq) {
  return handle("GET /v1/audit", bearer, [&](Request& req) {
    require_owner(req);
    return audit_->since(since_seq);
  });
}

void PdsService::provision_aggregation(std::string_view bearer,
                                       const Provisioning& provisioning) {
  handle("POST /v1/aggregate/provision", bearer, [&](Request& req) {
    require_owner(req);
    participant_->provision(provisioning);
  });
}

void PdsService::open_aggregation(std::string_view bearer,
                                  const agg::SessionAnnouncement& announcement) {
  handle("POST /v1/aggregate/sessions", bearer, [&](Request& req) {
    require_scope(req, scopes::kAggregateParticipate, Errc::kNotAuthorized);
    participant_->open(announcement);
  });
}

agg::MaskedShare PdsService::contribute(std::string_view bearer, const std::string& session_id) {
  return handle("POST /v1/aggregate/sessions/{id}/contribute", bearer, [&](Request& req) {
    require_scope(req, scopes::kAggregateParticipate, Errc::kNotAuthorized);
    auto c = participant_->contribute(
        session_id, [&](const std::string& question_id, const std::string& field) {
          return local_value(question_id, field);
        });
    req.subject_ids = std::move(c.sources);
    return c.share;
  });
}

Error PdsService::reject_request(std::string_view bearer, const std::string& endpoint,
                                 Error error) {
  Request req;
  req.endpoint = endpoint;
  req.timestamp_micros = clock_();
  req.caller = identify(bearer, req.timestamp_micros);
  write_audit(req, Outcome::kDenied, std::string(error.code_name()));
  return error;
}

LocalValue PdsService::local_value(const std::string& question_id, const std::string& field) {
  std::vector<qe::Answer> answers;
  try {
    answers = engine_->get_answers(question_id);
  } catch (const Error& e) {
    if (e.code() != Errc::kUnknownQuestion) throw;
  }
  if (answers.empty()) throw Error(Errc::kNoSuchAnswer, "no answers for " + question_id);
  LocalValue local;
  std::set<std::string> sources;
  double total = 0.0;
  for (const auto& a : answers) {
    const auto* node = find_field(a.payload, field);
    if (!node || !node->is_number()) {
      throw Error(Errc::kNoSuchAnswer, "answer lacks numeric field " + field);
    }
    total += node->get<double>();
    sources.insert(a.sources.begin(), a.sources.end());
  }
  local.value = total / static_cast<double>(answers.size());
  local.sources.assign(sources.begin(), sources.end());
  return local;
}

std::vector<qe::ComputationJob> PdsService::scheduled_sweep() {
  return engine_->run_due_jobs(clock_());
}

Scheduler::Scheduler(PdsService& service) : service_(service) {
  thread_ = std::thread([this] {
    const auto tick = std::chrono::seconds(service_.config().schedule_tick_seconds);
    std::unique_lock lock(mutex_);
    while (!stopping_) {
      lock.unlock();
      try {
        service_.scheduled_sweep();
      } catch (const std::exception& e) {
        std::cerr << "npds: scheduled sweep failed: " << e.what() << '\n';
      }
      lock.lock();
      wake_.wait_for(lock, tick, [this] { return stopping_; });
    }
  });
}

Scheduler::~Scheduler() { stop(); }

void Scheduler::stop() {
  {
    std::lock_guard guard(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  if (thread_.joinable()) thread_.join();
}

}  // namespace npds::api
