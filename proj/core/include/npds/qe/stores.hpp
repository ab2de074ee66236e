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

#ifndef NPDS_QE_STORES_HPP_
#define NPDS_QE_STORES_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "npds/eeg/recording.hpp"
#include "npds/qe/question.hpp"
#include "npds/sql/database.hpp"

namespace npds::qe {

struct RecordingInfo {
  std::string recording_id;
  std::int64_t start_micros = 0;
  std::int64_t end_micros = 0;
  std::size_t channel_count = 0;
  std::size_t sample_count = 0;
  double sample_rate_hz = 0.0;
  std::optional<eeg::GeoLocation> location;
  std::int64_t uploaded_at_micros = 0;

  Subject subject() const { return {recording_id, start_micros, end_micros}; }
};

// Raw uploads, kept byte-for-byte as received.
class RecordingStore {
 public:
  explicit RecordingStore(sql::Database& db);

  // Returns false when the id already exists (nothing written).
  bool insert(const eeg::EegRecording& rec, std::span<const std::uint8_t> bytes,
              std::int64_t uploaded_at_micros);
  bool contains(const std::string& recording_id);
  std::optional<std::vector<std::uint8_t>> bytes(const std::string& recording_id);
  // Parses the stored file. Throws Errc::kUnknownRecording.
  eeg::EegRecording load(const std::string& recording_id);
  std::optional<RecordingInfo> info(const std::string& recording_id);
  // Ordered by (start time, id).
  std::vector<RecordingInfo> list();
  std::size_t remove(const std::vector<std::string>& recording_ids);

 private:
  sql::Database& db_;
};

class AnswerStore {
 public:
  explicit AnswerStore(sql::Database& db);

  // Stores the answer and its source recordings; returns the new answer id.
  // Callers wanting atomicity with other writes hold a sql::Transaction.
  std::int64_t insert(const Answer& answer);
  // Most recent answer of (question, version, subject).
  std::optional<Answer> latest(const std::string& question_id, int version,
                               const std::string& subject_id);
  // Most recent answer per subject for one question version, ordered by
  // subject start time then subject id.
  std::vector<Answer> latest_per_subject(const std::string& question_id, int version,
                                         const AnswerFilter& filter = {});
  // Every stored answer of a question, all versions, oldest first.
  std::vector<Answer> history(const std::string& question_id);

  struct Removed {
    std::size_t answers = 0;
    // (question_id, version, subject_id) whose answers were dropped.
    std::set<std::tuple<std::string, int, std::string>> keys;
  };
  // Deletes answers about, or derived from, any of the recordings.
  Removed remove_derived_from(const std::vector<std::string>& recording_ids);

 private:
  std::vector<Answer> read(sql::Statement& stmt);

  sql::Database& db_;
};

}  // namespace npds::qe

#endif  // NPDS_QE_STORES_HPP_
