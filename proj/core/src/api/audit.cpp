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

#include "npds/api/audit.hpp"

#include <algorithm>

namespace npds::api {
namespace {

std::optional<AnomalyFlag> flag_from_name(std::string_view name) {
  if (name == "RATE_EXCEEDED") return AnomalyFlag::kRateExceeded;
  if (name == "FIRST_SCOPE_USE") return AnomalyFlag::kFirstScopeUse;
  if (name == "DENIED") return AnomalyFlag::kDenied;
  return std::nullopt;
}

}  // namespace

std::string_view outcome_name(Outcome outcome) {
  return outcome == Outcome::kAllowed ? "ALLOWED" : "DENIED";
}

std::string_view anomaly_flag_name(AnomalyFlag flag) {
  switch (flag) {
    case AnomalyFlag::kRateExceeded: return "RATE_EXCEEDED";
    case AnomalyFlag::kFirstScopeUse: return "FIRST_SCOPE_USE";
    case AnomalyFlag::kDenied: return "DENIED";
  }
  return "DENIED";
}

nlohmann::json to_json(const AuditEntry& e) {
  nlohmann::json flags = nlohmann::json::array();
  for (auto f : e.anomaly_flags) flags.push_back(anomaly_flag_name(f));
  nlohmann::json j{{"seq", e.seq},
                   {"timestamp", e.timestamp_micros},
                   {"client_id", e.client_id},
                   {"endpoint", e.endpoint},
                   {"scope_used", e.scope_used},
                   {"subject_ids", e.subject_ids},
                   {"outcome", outcome_name(e.outcome)},
                   {"anomaly_flags", flags}};
  j["error"] = e.error ? nlohmann::json(*e.error) : nlohmann::json(nullptr);
  return j;
}

AuditEntry audit_entry_from_json(const nlohmann::json& j) {
  AuditEntry e;
  e.seq = j.at("seq").get<std::int64_t>();
  e.timestamp_micros = j.at("timestamp").get<std::int64_t>();
  e.client_id = j.at("client_id").get<std::string>();
  e.endpoint = j.at("endpoint").get<std::string>();
  e.scope_used = j.at("scope_used").get<std::string>();
  e.subject_ids = j.at("subject_ids").get<std::vector<std::string>>();
  e.outcome = j.at("outcome") == "ALLOWED" ? Outcome::kAllowed : Outcome::kDenied;
  if (!j.at("error").is_null()) e.error = j.at("error").get<std::string>();
  for (const auto& f : j.at("anomaly_flags")) {
    if (auto flag = flag_from_name(f.get<std::string>())) e.anomaly_flags.insert(*flag);
  }
  return e;
}

std::set<AnomalyFlag> AnomalyDetector::observe(const AuditEntry& entry) {
  std::set<AnomalyFlag> flags;
  auto& times = recent_[entry.client_id];
  const std::int64_t cutoff = entry.timestamp_micros - kRateWindowMicros;
  while (!times.empty() && times.front() < cutoff) times.pop_front();
  times.push_back(entry.timestamp_micros);
  const auto in_window = std::count_if(times.begin(), times.end(), [&](std::int64_t t) {
    return t >= cutoff && t <= entry.timestamp_micros;
  });
  if (static_cast<std::size_t>(in_window) > kRateLimitRequests) {
    flags.insert(AnomalyFlag::kRateExceeded);
  }
  if (seen_scopes_.emplace(entry.client_id, entry.scope_used).second) {
    flags.insert(AnomalyFlag::kFirstScopeUse);
  }
  if (entry.outcome == Outcome::kDenied) flags.insert(AnomalyFlag::kDenied);
  return flags;
}

std::vector<AuditEntry> flag_anomalies(std::vector<AuditEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const AuditEntry& a, const AuditEntry& b) { return a.seq < b.seq; });
  AnomalyDetector detector;
  for (auto& e : entries) e.anomaly_flags = detector.observe(e);
  return entries;
}

AuditLog::AuditLog(sql::Database& db) : db_(db) {
  db_.exec(R"sql(
    CREATE TABLE IF NOT EXISTS audit (
      seq INTEGER PRIMARY KEY,
      timestamp INTEGER NOT NULL,
      entry TEXT NOT NULL
    ))sql");
  // Rebuild detector state from the persisted prefix.
  for (const auto& e : since(0)) {
    detector_.observe(e);
    next_seq_ = e.seq + 1;
  }
}

AuditEntry AuditLog::append(AuditEntry entry) {
  std::lock_guard guard(mutex_);
  entry.seq = next_seq_;
  entry.anomaly_flags = detector_.observe(entry);
  db_.prepare("INSERT INTO audit VALUES (?1, ?2, ?3)")
      .bind_all(entry.seq, entry.timestamp_micros, to_json(entry).dump())
      .run();
  ++next_seq_;
  return entry;
}

std::vector<AuditEntry> AuditLog::since(std::int64_t seq_exclusive) {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT entry FROM audit WHERE seq > ?1 ORDER BY seq");
  stmt.bind(1, seq_exclusive);
  std::vector<AuditEntry> out;
  while (stmt.step()) {
    out.push_back(audit_entry_from_json(nlohmann::json::parse(stmt.column_text(0))));
  }
  return out;
}

std::int64_t AuditLog::last_seq() {
  std::lock_guard guard(mutex_);
  return next_seq_ - 1;
}

}  // namespace npds::api
