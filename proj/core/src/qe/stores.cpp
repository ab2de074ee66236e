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

#include "npds/qe/stores.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "npds/eeg/format.hpp"
#include "npds/error.hpp"

namespace npds::qe {

RecordingStore::RecordingStore(sql::Database& db) : db_(db) {
  db_.exec(R"sql(
    CREATE TABLE IF NOT EXISTS recordings (
      recording_id TEXT PRIMARY KEY,
      bytes BLOB NOT NULL,
      start_micros INTEGER NOT NULL,
      end_micros INTEGER NOT NULL,
      channel_count INTEGER NOT NULL,
      sample_count INTEGER NOT NULL,
      sample_rate REAL NOT NULL,
      lat REAL,
      lon REAL,
      uploaded_at INTEGER NOT NULL
    ))sql");
}

bool RecordingStore::insert(const eeg::EegRecording& rec,
                            std::span<const std::uint8_t> bytes,
                            std::int64_t uploaded_at_micros) {
  auto lock = db_.lock();
  if (contains(rec.recording_id())) return false;
  const auto& loc = rec.metadata().location;
  auto stmt = db_.prepare(
      "INSERT INTO recordings VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10)");
  stmt.bind(1, rec.recording_id())
      .bind_blob(2, bytes)
      .bind(3, rec.start_time_micros())
      .bind(4, rec.end_time_micros())
      .bind(5, static_cast<std::int64_t>(rec.channel_count()))
      .bind(6, static_cast<std::int64_t>(rec.sample_count()))
      .bind(7, rec.sample_rate_hz());
  if (loc) {
    stmt.bind(8, loc->latitude_deg).bind(9, loc->longitude_deg);
  } else {
    stmt.bind_null(8).bind_null(9);
  }
  stmt.bind(10, uploaded_at_micros).run();
  return true;
}

bool RecordingStore::contains(const std::string& recording_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT 1 FROM recordings WHERE recording_id = ?1");
  stmt.bind(1, recording_id);
  return stmt.step();
}

std::optional<std::vector<std::uint8_t>> RecordingStore::bytes(
    const std::string& recording_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT bytes FROM recordings WHERE recording_id = ?1");
  stmt.bind(1, recording_id);
  if (!stmt.step()) return std::nullopt;
  return stmt.column_blob(0);
}

eeg::EegRecording RecordingStore::load(const std::string& recording_id) {
  auto raw = bytes(recording_id);
  if (!raw) throw Error(Errc::kUnknownRecording, "no recording '" + recording_id + "'");
  return eeg::parse_recording(*raw);
}

namespace {

RecordingInfo read_info(const sql::Statement& stmt) {
  RecordingInfo info;
  info.recording_id = stmt.column_text(0);
  info.start_micros = stmt.column_int64(1);
  info.end_micros = stmt.column_int64(2);
  info.channel_count = static_cast<std::size_t>(stmt.column_int64(3));
  info.sample_count = static_cast<std::size_t>(stmt.column_int64(4));
  info.sample_rate_hz = stmt.column_double(5);
  if (!stmt.column_is_null(6)) {
    info.location = eeg::GeoLocation{stmt.column_double(6), stmt.column_double(7)};
  }
  info.uploaded_at_micros = stmt.column_int64(8);
  return info;
}

constexpr const char* kInfoColumns =
    "SELECT recording_id, start_micros, end_micros, channel_count, sample_count, "
    "sample_rate, lat, lon, uploaded_at FROM recordings";

}  // namespace

std::optional<RecordingInfo> RecordingStore::info(const std::string& recording_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare(std::string(kInfoColumns) + " WHERE recording_id = ?1");
  stmt.bind(1, recording_id);
  if (!stmt.step()) return std::nullopt;
  return read_info(stmt);
}

std::vector<RecordingInfo> RecordingStore::list() {
  auto lock = db_.lock();
  auto stmt = db_.prepare(std::string(kInfoColumns) +
                          " ORDER BY start_micros, recording_id");
  std::vector<RecordingInfo> out;
  while (stmt.step()) out.push_back(read_info(stmt));
  return out;
}

std::size_t RecordingStore::remove(const std::vector<std::string>& recording_ids) {
  auto lock = db_.lock();
  std::size_t removed = 0;
  auto stmt = db_.prepare("DELETE FROM recordings WHERE recording_id = ?1");
  for (const auto& id : recording_ids) {
    stmt.reset();
    stmt.bind(1, id).run();
    removed += static_cast<std::size_t>(db_.changes());
  }
  return removed;
}

AnswerStore::AnswerStore(sql::Database& db) : db_(db) {
  db_.exec(R"sql(
    CREATE TABLE IF NOT EXISTS answers (
      answer_id INTEGER PRIMARY KEY AUTOINCREMENT,
      question_id TEXT NOT NULL,
      version INTEGER NOT NULL,
      subject_id TEXT NOT NULL,
      subject_start INTEGER NOT NULL,
      subject_end INTEGER NOT NULL,
      payload TEXT NOT NULL,
      computed_at INTEGER NOT NULL
    );
    CREATE INDEX IF NOT EXISTS answers_by_subject
      ON answers (question_id, version, subject_id);
    CREATE TABLE IF NOT EXISTS answer_sources (
      answer_id INTEGER NOT NULL REFERENCES answers (answer_id) ON DELETE CASCADE,
      recording_id TEXT NOT NULL
    );
    CREATE INDEX IF NOT EXISTS answer_sources_by_recording
      ON answer_sources (recording_id);
  )sql");
}

std::int64_t AnswerStore::insert(const Answer& answer) {
  auto lock = db_.lock();
  db_.prepare(
         "INSERT INTO answers (question_id, version, subject_id, subject_start, "
         "subject_end, payload, computed_at) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)")
      .bind_all(answer.question_id, answer.version, answer.subject.id,
                answer.subject.start_micros, answer.subject.end_micros,
                answer.payload.dump(), answer.computed_at_micros)
      .run();
  const auto id = db_.last_insert_rowid();
  auto src = db_.prepare("INSERT INTO answer_sources VALUES (?1, ?2)");
  for (const auto& rec : answer.sources) {
    src.reset();
    src.bind(1, id).bind(2, rec).run();
  }
  return id;
}

std::vector<Answer> AnswerStore::read(sql::Statement& stmt) {
  std::vector<Answer> out;
  while (stmt.step()) {
    Answer a;
    a.answer_id = stmt.column_int64(0);
    a.question_id = stmt.column_text(1);
    a.version = static_cast<int>(stmt.column_int64(2));
    a.subject = Subject{stmt.column_text(3), stmt.column_int64(4), stmt.column_int64(5)};
    a.payload = Json::parse(stmt.column_text(6));
    a.computed_at_micros = stmt.column_int64(7);
    out.push_back(std::move(a));
  }
  auto src = db_.prepare(
      "SELECT recording_id FROM answer_sources WHERE answer_id = ?1 ORDER BY recording_id");
  for (auto& a : out) {
    src.reset();
    src.bind(1, a.answer_id);
    while (src.step()) a.sources.push_back(src.column_text(0));
  }
  return out;
}

namespace {
constexpr const char* kAnswerColumns =
    "SELECT answer_id, question_id, version, subject_id, subject_start, subject_end, "
    "payload, computed_at FROM answers";
}  // namespace

std::optional<Answer> AnswerStore::latest(const std::string& question_id, int version,
                                          const std::string& subject_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare(std::string(kAnswerColumns) +
                          " WHERE question_id = ?1 AND version = ?2 AND subject_id = ?3"
                          " ORDER BY answer_id DESC LIMIT 1");
  stmt.bind_all(question_id, version, subject_id);
  auto rows = read(stmt);
  if (rows.empty()) return std::nullopt;
  return std::move(rows.front());
}

std::vector<Answer> AnswerStore::latest_per_subject(const std::string& question_id,
                                                    int version,
                                                    const AnswerFilter& filter) {
  auto lock = db_.lock();
  auto stmt = db_.prepare(
      std::string(kAnswerColumns) +
      " WHERE answer_id IN (SELECT MAX(answer_id) FROM answers"
      "   WHERE question_id = ?1 AND version = ?2 GROUP BY subject_id)"
      " AND subject_end >= ?3 AND subject_start <= ?4"
      " ORDER BY subject_start, subject_id");
  stmt.bind_all(question_id, version,
                filter.from_micros.value_or(std::numeric_limits<std::int64_t>::min()),
                filter.to_micros.value_or(std::numeric_limits<std::int64_t>::max()));
  auto rows = read(stmt);
  if (filter.subject_ids) {
    std::erase_if(rows, [&](const Answer& a) { return !filter.subject_ids->count(a.subject.id); });
  }
  return rows;
}

std::vector<Answer> AnswerStore::history(const std::string& question_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare(std::string(kAnswerColumns) +
                          " WHERE question_id = ?1 ORDER BY answer_id");
  stmt.bind(1, question_id);
  return read(stmt);
}

AnswerStore::Removed AnswerStore::remove_derived_from(
    const std::vector<std::string>& recording_ids) {
  auto lock = db_.lock();
  Removed removed;
  std::set<std::int64_t> doomed;
  auto by_subject = db_.prepare("SELECT answer_id FROM answers WHERE subject_id = ?1");
  auto by_source = db_.prepare("SELECT answer_id FROM answer_sources WHERE recording_id = ?1");
  for (const auto& id : recording_ids) {
    by_subject.reset();
    by_subject.bind(1, id);
    while (by_subject.step()) doomed.insert(by_subject.column_int64(0));
    by_source.reset();
    by_source.bind(1, id);
    while (by_source.step()) doomed.insert(by_source.column_int64(0));
  }
  auto key = db_.prepare("SELECT question_id, version, subject_id FROM answers WHERE answer_id = ?1");
  auto del = db_.prepare("DELETE FROM answers WHERE answer_id = ?1");
  for (auto answer_id : doomed) {
    key.reset();
    key.bind(1, answer_id);
    if (key.step()) {
      removed.keys.emplace(key.column_text(0), static_cast<int>(key.column_int64(1)),
                           key.column_text(2));
    }
    del.reset();
    del.bind(1, answer_id).run();
    removed.answers += static_cast<std::size_t>(db_.changes());
  }
  return removed;
}

}  // namespace npds::qe
