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

#include "npds/api/grants.hpp"

#include <sodium.h>

#include <array>

#include "npds/agg/masking.hpp"
#include "npds/error.hpp"

namespace npds::api {
namespace {

GrantState state_from_name(std::string_view name) {
  if (name == "PENDING") return GrantState::kPending;
  if (name == "ACTIVE") return GrantState::kActive;
  return GrantState::kRevoked;
}

std::string token_hash(std::string_view token) {
  std::array<std::uint8_t, 32> digest{};
  crypto_generichash(digest.data(), digest.size(),
                     reinterpret_cast<const unsigned char*>(token.data()), token.size(),
                     nullptr, 0);
  return agg::to_hex(digest);
}

std::string random_token() {
  if (sodium_init() < 0) throw Error(Errc::kInternal, "libsodium failed to initialize");
  std::array<std::uint8_t, 32> bytes{};
  randombytes_buf(bytes.data(), bytes.size());
  return agg::to_hex(bytes);
}

constexpr std::string_view kGrantColumns =
    "grant_id, client_id, scopes, state, created_at, decided_at";

Grant read_grant(const sql::Statement& stmt) {
  Grant g;
  g.grant_id = stmt.column_text(0);
  g.client_id = stmt.column_text(1);
  for (const auto& s : nlohmann::json::parse(stmt.column_text(2))) {
    g.scopes.insert(s.get<std::string>());
  }
  g.state = state_from_name(stmt.column_text(3));
  g.created_at_micros = stmt.column_int64(4);
  if (!stmt.column_is_null(5)) g.decided_at_micros = stmt.column_int64(5);
  return g;
}

}  // namespace

std::string_view grant_state_name(GrantState state) {
  switch (state) {
    case GrantState::kPending: return "PENDING";
    case GrantState::kActive: return "ACTIVE";
    case GrantState::kRevoked: return "REVOKED";
  }
  return "REVOKED";
}

nlohmann::json to_json(const Grant& g) {
  nlohmann::json j{{"grant_id", g.grant_id},
                   {"client_id", g.client_id},
                   {"scopes", g.scopes},
                   {"state", grant_state_name(g.state)},
                   {"created_at", g.created_at_micros}};
  j["decided_at"] =
      g.decided_at_micros ? nlohmann::json(*g.decided_at_micros) : nlohmann::json(nullptr);
  return j;
}

GrantStore::GrantStore(sql::Database& db) : db_(db) {
  db_.exec(R"sql(
    CREATE TABLE IF NOT EXISTS grants (
      seq INTEGER PRIMARY KEY AUTOINCREMENT,
      grant_id TEXT UNIQUE,
      client_id TEXT NOT NULL,
      scopes TEXT NOT NULL,
      state TEXT NOT NULL,
      created_at INTEGER NOT NULL,
      decided_at INTEGER
    );
    CREATE TABLE IF NOT EXISTS tokens (
      token_hash TEXT PRIMARY KEY,
      grant_id TEXT NOT NULL REFERENCES grants(grant_id) ON DELETE CASCADE,
      expires_at INTEGER NOT NULL
    ))sql");
}

Grant GrantStore::create(const std::string& client_id, std::set<std::string> scopes,
                         std::int64_t now_micros) {
  sql::Transaction tx(db_);
  db_.prepare(
         "INSERT INTO grants (client_id, scopes, state, created_at) "
         "VALUES (?1, ?2, 'PENDING', ?3)")
      .bind_all(client_id, nlohmann::json(scopes).dump(), now_micros)
      .run();
  const auto seq = db_.last_insert_rowid();
  Grant g{"grant-" + std::to_string(seq), client_id, std::move(scopes),
          GrantState::kPending, now_micros, std::nullopt};
  db_.prepare("UPDATE grants SET grant_id = ?1 WHERE seq = ?2").bind_all(g.grant_id, seq).run();
  tx.commit();
  return g;
}

std::optional<Grant> GrantStore::find(const std::string& grant_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT " + std::string(kGrantColumns) +
                          " FROM grants WHERE grant_id = ?1");
  stmt.bind(1, grant_id);
  if (!stmt.step()) return std::nullopt;
  return read_grant(stmt);
}

std::vector<Grant> GrantStore::list() {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT " + std::string(kGrantColumns) + " FROM grants ORDER BY seq");
  std::vector<Grant> out;
  while (stmt.step()) out.push_back(read_grant(stmt));
  return out;
}

GrantStore::Decision GrantStore::decide(const std::string& grant_id, bool approve,
                                        std::int64_t now_micros,
                                        std::int64_t token_ttl_seconds) {
  sql::Transaction tx(db_);
  auto grant = find(grant_id);
  if (!grant) throw Error(Errc::kUnknownGrant, "no grant " + grant_id);
  if (grant->state != GrantState::kPending) {
    throw Error(Errc::kAlreadyDecided,
                "grant " + grant_id + " is " + std::string(grant_state_name(grant->state)));
  }
  grant->state = approve ? GrantState::kActive : GrantState::kRevoked;
  grant->decided_at_micros = now_micros;
  db_.prepare("UPDATE grants SET state = ?1, decided_at = ?2 WHERE grant_id = ?3")
      .bind_all(grant_state_name(grant->state), now_micros, grant_id)
      .run();
  Decision decision{*grant, std::nullopt};
  if (approve) {
    AccessToken token{random_token(), grant_id,
                      now_micros + token_ttl_seconds * 1'000'000};
    db_.prepare("INSERT INTO tokens VALUES (?1, ?2, ?3)")
        .bind_all(token_hash(token.token), grant_id, token.expires_at_micros)
        .run();
    decision.token = std::move(token);
  }
  tx.commit();
  return decision;
}

Grant GrantStore::revoke(const std::string& grant_id, std::int64_t now_micros) {
  sql::Transaction tx(db_);
  auto grant = find(grant_id);
  if (!grant) throw Error(Errc::kUnknownGrant, "no grant " + grant_id);
  if (grant->state != GrantState::kRevoked) {
    grant->state = GrantState::kRevoked;
    grant->decided_at_micros = now_micros;
    db_.prepare("UPDATE grants SET state = 'REVOKED', decided_at = ?1 WHERE grant_id = ?2")
        .bind_all(now_micros, grant_id)
        .run();
  }
  tx.commit();
  return *grant;
}

std::optional<TokenLookup> GrantStore::resolve(std::string_view token) {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT grant_id, expires_at FROM tokens WHERE token_hash = ?1");
  stmt.bind(1, token_hash(token));
  if (!stmt.step()) return std::nullopt;
  const auto grant_id = stmt.column_text(0);
  const auto expires = stmt.column_int64(1);
  auto grant = find(grant_id);
  if (!grant) return std::nullopt;
  return TokenLookup{std::move(*grant), expires};
}

}  // namespace npds::api
