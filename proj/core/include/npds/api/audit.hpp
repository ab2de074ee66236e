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

#ifndef NPDS_API_AUDIT_HPP_
#define NPDS_API_AUDIT_HPP_

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "npds/sql/database.hpp"

namespace npds::api {

enum class Outcome { kAllowed, kDenied };

enum class AnomalyFlag { kRateExceeded, kFirstScopeUse, kDenied };

std::string_view outcome_name(Outcome outcome);
std::string_view anomaly_flag_name(AnomalyFlag flag);

struct AuditEntry {
  std::int64_t seq = 0;
  std::int64_t timestamp_micros = 0;
  std::string client_id;
  std::string endpoint;
  std::string scope_used;
  std::vector<std::string> subject_ids;
  Outcome outcome = Outcome::kAllowed;
  // Error code name for denied requests.
  std::optional<std::string> error;
  std::set<AnomalyFlag> anomaly_flags;
};

nlohmann::json to_json(const AuditEntry& entry);
AuditEntry audit_entry_from_json(const nlohmann::json& j);

inline constexpr std::size_t kRateLimitRequests = 60;
inline constexpr std::int64_t kRateWindowMicros = 60'000'000;

// Flags an entry from the log prefix before it:
//   RATE_EXCEEDED    more than 60 requests by the client within the 60 s
//                    ending at this entry (inclusive)
//   FIRST_SCOPE_USE  first (client, scope) pair ever seen
//   DENIED           the request was denied
class AnomalyDetector {
 public:
  std::set<AnomalyFlag> observe(const AuditEntry& entry);

 private:
  std::map<std::string, std::deque<std::int64_t>> recent_;
  std::set<std::pair<std::string, std::string>> seen_scopes_;
};

// Recomputes flags over a log in seq order.
std::vector<AuditEntry> flag_anomalies(std::vector<AuditEntry> entries);

// Append-only, gap-free audit log persisted alongside the store.
class AuditLog {
 public:
  explicit AuditLog(sql::Database& db);

  // Assigns seq and anomaly flags, persists, and returns the stored entry.
  AuditEntry append(AuditEntry entry);
  std::vector<AuditEntry> since(std::int64_t seq_exclusive);
  std::int64_t last_seq();

 private:
  sql::Database& db_;
  std::mutex mutex_;
  AnomalyDetector detector_;
  std::int64_t next_seq_ = 1;
};

}  // namespace npds::api

#endif  // NPDS_API_AUDIT_HPP_
