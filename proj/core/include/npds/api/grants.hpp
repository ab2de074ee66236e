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

#ifndef NPDS_API_GRANTS_HPP_
#define NPDS_API_GRANTS_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "npds/sql/database.hpp"

namespace npds::api {

enum class GrantState { kPending, kActive, kRevoked };

std::string_view grant_state_name(GrantState state);

struct Grant {
  std::string grant_id;
  std::string client_id;
  std::set<std::string> scopes;
  GrantState state = GrantState::kPending;
  std::int64_t created_at_micros = 0;
  std::optional<std::int64_t> decided_at_micros;
};

nlohmann::json to_json(const Grant& grant);

struct AccessToken {
  // 64 hex digits (32 random bytes). Only a hash is persisted.
  std::string token;
  std::string grant_id;
  std::int64_t expires_at_micros = 0;
};

// A token resolved to its grant, whatever the grant's state.
struct TokenLookup {
  Grant grant;
  std::int64_t expires_at_micros = 0;

  bool usable_at(std::int64_t now_micros) const {
    return grant.state == GrantState::kActive && now_micros < expires_at_micros;
  }
};

// Grant state machine: PENDING -> ACTIVE | REVOKED, ACTIVE -> REVOKED.
class GrantStore {
 public:
  explicit GrantStore(sql::Database& db);

  Grant create(const std::string& client_id, std::set<std::string> scopes,
               std::int64_t now_micros);
  std::optional<Grant> find(const std::string& grant_id);
  std::vector<Grant> list();

  struct Decision {
    Grant grant;
    std::optional<AccessToken> token;
  };
  // Approval activates the grant and issues a token; denial revokes it.
  // Throws Errc::kUnknownGrant, Errc::kAlreadyDecided.
  Decision decide(const std::string& grant_id, bool approve, std::int64_t now_micros,
                  std::int64_t token_ttl_seconds);
  // Idempotent on REVOKED grants. Throws Errc::kUnknownGrant.
  Grant revoke(const std::string& grant_id, std::int64_t now_micros);

  std::optional<TokenLookup> resolve(std::string_view token);

 private:
  sql::Database& db_;
};

}  // namespace npds::api

#endif  // NPDS_API_GRANTS_HPP_
