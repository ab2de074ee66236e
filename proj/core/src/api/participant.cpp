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

#include "npds/api/participant.hpp"

#include <algorithm>
#include <set>

#include "npds/agg/aggregator.hpp"
#include "npds/agg/fixed_point.hpp"
#include "npds/error.hpp"

namespace npds::api {
namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(Errc::kInvalidRequest, what);
}

}  // namespace

nlohmann::json to_json(const Provisioning& p) {
  nlohmann::json seeds = nlohmann::json::object();
  for (const auto& [peer, seed] : p.pair_seeds) seeds[peer] = agg::to_hex(seed);
  return {{"session_id", p.session_id},
          {"participant_id", p.participant_id},
          {"participants", p.participants},
          {"pair_seeds", seeds}};
}

Provisioning provisioning_from_json(const nlohmann::json& j) {
  Provisioning p;
  try {
    p.session_id = j.at("session_id").get<std::string>();
    p.participant_id = j.at("participant_id").get<std::string>();
    p.participants = j.at("participants").get<std::vector<std::string>>();
    for (const auto& [peer, hex] : j.at("pair_seeds").items()) {
      p.pair_seeds[peer] = agg::pair_seed_from_hex(hex.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed provisioning: ") + e.what());
  } catch (const Error& e) {
    invalid(e.what());
  }
  return p;
}

ParticipantStore::ParticipantStore(sql::Database& db) : db_(db) {
  db_.exec(R"sql(
    CREATE TABLE IF NOT EXISTS agg_provisioning (
      session_id TEXT PRIMARY KEY,
      setup TEXT NOT NULL
    );
    CREATE TABLE IF NOT EXISTS agg_sessions (
      session_id TEXT PRIMARY KEY,
      question_id TEXT NOT NULL,
      field TEXT NOT NULL,
      participants_hash TEXT NOT NULL,
      share TEXT,
      sources TEXT
    ))sql");
}

void ParticipantStore::provision(const Provisioning& p) {
  if (p.session_id.empty()) invalid("session_id must not be empty");
  std::set<std::string> members(p.participants.begin(), p.participants.end());
  if (members.size() != p.participants.size()) invalid("duplicate participants");
  if (members.size() < agg::kMinGroupSize) {
    throw Error(Errc::kMinimumGroupSize, "a session needs at least " +
                                             std::to_string(agg::kMinGroupSize) + " participants");
  }
  if (!members.contains(p.participant_id)) invalid("participant_id is not a participant");
  for (const auto& peer : members) {
    if (peer == p.participant_id) continue;
    if (!p.pair_seeds.contains(peer)) invalid("missing pair seed for " + peer);
  }
  for (const auto& [peer, seed] : p.pair_seeds) {
    if (!members.contains(peer) || peer == p.participant_id) {
      invalid("pair seed for non-peer " + peer);
    }
  }
  std::lock_guard guard(mutex_);
  sql::Transaction tx(db_);
  auto stmt = db_.prepare("SELECT 1 FROM agg_sessions WHERE session_id = ?1");
  stmt.bind(1, p.session_id);
  if (stmt.step()) invalid("session " + p.session_id + " is already open");
  db_.prepare("INSERT OR REPLACE INTO agg_provisioning VALUES (?1, ?2)")
      .bind_all(p.session_id, to_json(p).dump())
      .run();
  tx.commit();
}

std::optional<Provisioning> ParticipantStore::load_provisioning(const std::string& session_id) {
  auto stmt = db_.prepare("SELECT setup FROM agg_provisioning WHERE session_id = ?1");
  stmt.bind(1, session_id);
  if (!stmt.step()) return std::nullopt;
  return provisioning_from_json(nlohmann::json::parse(stmt.column_text(0)));
}

void ParticipantStore::open(const agg::SessionAnnouncement& a) {
  if (a.scale != agg::kFixedPointScale) {
    invalid("unsupported scale " + std::to_string(a.scale));
  }
  std::lock_guard guard(mutex_);
  sql::Transaction tx(db_);
  const auto setup = load_provisioning(a.session_id);
  if (!setup) throw Error(Errc::kUnknownSession, "session " + a.session_id + " not provisioned");
  if (agg::participants_hash(a.session_id, setup->participants) != a.participants_hash) {
    throw Error(Errc::kSessionMismatch, "participant list hash differs");
  }
  auto stmt = db_.prepare(
      "SELECT question_id, field, participants_hash FROM agg_sessions WHERE session_id = ?1");
  stmt.bind(1, a.session_id);
  if (stmt.step()) {
    if (stmt.column_text(0) != a.question_id || stmt.column_text(1) != a.field ||
        stmt.column_text(2) != a.participants_hash) {
      throw Error(Errc::kSessionMismatch, "session " + a.session_id + " announced differently");
    }
    return;
  }
  db_.prepare("INSERT INTO agg_sessions (session_id, question_id, field, participants_hash) "
              "VALUES (?1, ?2, ?3, ?4)")
      .bind_all(a.session_id, a.question_id, a.field, a.participants_hash)
      .run();
  tx.commit();
}

Contribution ParticipantStore::contribute(const std::string& session_id,
                                          const LocalValueFn& local_value) {
  std::lock_guard guard(mutex_);
  sql::Transaction tx(db_);
  auto stmt = db_.prepare(
      "SELECT question_id, field, share, sources FROM agg_sessions WHERE session_id = ?1");
  stmt.bind(1, session_id);
  if (!stmt.step()) throw Error(Errc::kUnknownSession, "session " + session_id + " not open");
  const auto question_id = stmt.column_text(0);
  const auto field = stmt.column_text(1);
  const auto setup = load_provisioning(session_id);
  if (!setup) throw Error(Errc::kUnknownSession, "session " + session_id + " not provisioned");
  if (!stmt.column_is_null(2)) {
    return {{setup->participant_id, std::stoull(stmt.column_text(2))},
            nlohmann::json::parse(stmt.column_text(3)).get<std::vector<std::string>>()};
  }

  auto sorted = setup->participants;
  std::sort(sorted.begin(), sorted.end());
  auto index = [&](const std::string& id) {
    return static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), id) -
                                      sorted.begin());
  };
  std::map<std::uint32_t, agg::PairSeed> seeds;
  for (const auto& [peer, seed] : setup->pair_seeds) seeds[index(peer)] = seed;

  const auto local = local_value(question_id, field);
  const auto value =
      agg::apply_pairwise_masks(agg::encode_fixed(local.value), session_id,
                                index(setup->participant_id),
                                static_cast<std::uint32_t>(sorted.size()), seeds);
  db_.prepare("UPDATE agg_sessions SET share = ?1, sources = ?2 WHERE session_id = ?3")
      .bind_all(std::to_string(value), nlohmann::json(local.sources).dump(), session_id)
      .run();
  tx.commit();
  return {{setup->participant_id, value}, local.sources};
}

std::size_t ParticipantStore::forget_sources(const std::vector<std::string>& recording_ids) {
  const std::set<std::string> gone(recording_ids.begin(), recording_ids.end());
  std::lock_guard guard(mutex_);
  sql::Transaction tx(db_);
  std::vector<std::string> stale;
  auto stmt = db_.prepare("SELECT session_id, sources FROM agg_sessions WHERE share IS NOT NULL");
  while (stmt.step()) {
    for (const auto& s : nlohmann::json::parse(stmt.column_text(1))) {
      if (gone.contains(s.get<std::string>())) {
        stale.push_back(stmt.column_text(0));
        break;
      }
    }
  }
  for (const auto& id : stale) {
    db_.prepare("DELETE FROM agg_sessions WHERE session_id = ?1").bind(1, id).run();
    db_.prepare("DELETE FROM agg_provisioning WHERE session_id = ?1").bind(1, id).run();
  }
  tx.commit();
  return stale.size();
}

}  // namespace npds::api
