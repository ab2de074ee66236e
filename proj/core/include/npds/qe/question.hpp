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

#ifndef NPDS_QE_QUESTION_HPP_
#define NPDS_QE_QUESTION_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace npds::qe {

using Json = nlohmann::json;

// Input marker for questions that read the raw recording.
inline constexpr std::string_view kRawInput = "RAW";

struct Question {
  std::string question_id;
  // Assigned by the engine: 1 on first install, +1 on every changed reinstall.
  int version = 0;
  // "RAW" and/or ids of other installed questions.
  std::vector<std::string> inputs;
  std::map<std::string, std::string> params;
  std::string output_schema_id;
  std::int64_t schedule_period_seconds = 3600;
  std::string required_scope;

  bool reads_raw() const;
  std::vector<std::string> dependencies() const;
  // Everything except the version; a difference here forces a version bump.
  bool same_definition(const Question& other) const;
};

// A recording id, or a time window for questions aggregating over answers.
struct Subject {
  std::string id;
  std::int64_t start_micros = 0;
  std::int64_t end_micros = 0;

  bool operator==(const Subject&) const = default;
};

inline constexpr std::string_view kAllTimeWindowId = "window:all";

struct Answer {
  std::int64_t answer_id = 0;
  std::string question_id;
  int version = 0;
  Subject subject;
  Json payload;
  std::int64_t computed_at_micros = 0;
  // Recordings this answer was derived from; drives deletion cascade.
  std::vector<std::string> sources;
};

enum class JobState { kPending, kRunning, kDone, kFailed };

std::string_view job_state_name(JobState state);
JobState job_state_from_name(std::string_view name);

struct ComputationJob {
  std::string question_id;
  int version = 0;
  std::string subject_id;
  JobState state = JobState::kPending;
  int attempt = 0;
  std::optional<std::string> error;
  std::optional<std::int64_t> last_run_micros;
};

struct AnswerFilter {
  std::optional<std::set<std::string>> subject_ids;
  std::optional<std::int64_t> from_micros;
  std::optional<std::int64_t> to_micros;
};

Json to_json(const Question& q);
// Throws Errc::kInvalidQuestion on malformed documents. Missing
// required_scope defaults to "q:<question_id>".
Question question_from_json(const Json& j);

Json to_json(const Subject& s);
Json to_json(const Answer& a);
Answer answer_from_json(const Json& j);
Json to_json(const ComputationJob& job);

}  // namespace npds::qe

#endif  // NPDS_QE_QUESTION_HPP_
