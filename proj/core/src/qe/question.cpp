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

#include "npds/qe/question.hpp"

#include <algorithm>

#include "npds/error.hpp"

namespace npds::qe {

bool Question::reads_raw() const {
  return std::find(inputs.begin(), inputs.end(), kRawInput) != inputs.end();
}

std::vector<std::string> Question::dependencies() const {
  std::vector<std::string> deps;
  for (const auto& in : inputs) {
    if (in != kRawInput) deps.push_back(in);
  }
  return deps;
}

bool Question::same_definition(const Question& other) const {
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  return question_id == other.question_id &&
         sorted(inputs) == sorted(other.inputs) && params == other.params &&
         output_schema_id == other.output_schema_id &&
         schedule_period_seconds == other.schedule_period_seconds &&
         required_scope == other.required_scope;
}

std::string_view job_state_name(JobState state) {
  switch (state) {
    case JobState::kPending: return "PENDING";
    case JobState::kRunning: return "RUNNING";
    case JobState::kDone: return "DONE";
    case JobState::kFailed: return "FAILED";
  }
  return "FAILED";
}

JobState job_state_from_name(std::string_view name) {
  if (name == "PENDING") return JobState::kPending;
  if (name == "RUNNING") return JobState::kRunning;
  if (name == "DONE") return JobState::kDone;
  return JobState::kFailed;
}

Json to_json(const Question& q) {
  return Json{{"question_id", q.question_id},
              {"version", q.version},
              {"inputs", q.inputs},
              {"params", q.params},
              {"output_schema_id", q.output_schema_id},
              {"schedule_period_seconds", q.schedule_period_seconds},
              {"required_scope", q.required_scope}};
}

Question question_from_json(const Json& j) {
  auto bad = [](const std::string& what) {
    throw Error(Errc::kInvalidQuestion, what);
  };
  if (!j.is_object()) bad("question must be a JSON object");
  Question q;
  try {
    q.question_id = j.at("question_id").get<std::string>();
    q.output_schema_id = j.at("output_schema_id").get<std::string>();
    q.inputs = j.value("inputs", std::vector<std::string>{std::string(kRawInput)});
    if (j.contains("params")) {
      const auto& params = j.at("params");
      if (!params.is_object()) bad("params must be an object");
      for (const auto& [key, value] : params.items()) {
        q.params[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    q.schedule_period_seconds = j.value("schedule_period_seconds", std::int64_t{3600});
    q.required_scope = j.value("required_scope", std::string());
    q.version = j.value("version", 0);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed question: ") + e.what());
  }
  if (q.required_scope.empty()) q.required_scope = "q:" + q.question_id;
  return q;
}

Json to_json(const Subject& s) {
  return Json{{"id", s.id}, {"start", s.start_micros}, {"end", s.end_micros}};
}

Json to_json(const Answer& a) {
  return Json{{"answer_id", "ans-" + std::to_string(a.answer_id)},
              {"question_id", a.question_id},
              {"version", a.version},
              {"subject", to_json(a.subject)},
              {"payload", a.payload},
              {"computed_at", a.computed_at_micros}};
}

Answer answer_from_json(const Json& j) {
  Answer a;
  const auto id = j.at("answer_id").get<std::string>();
  a.answer_id = std::stoll(id.substr(id.find('-') + 1));
  a.question_id = j.at("question_id").get<std::string>();
  a.version = j.at("version").get<int>();
  const auto& s = j.at("subject");
  a.subject = Subject{s.at("id").get<std::string>(), s.at("start").get<std::int64_t>(),
                      s.at("end").get<std::int64_t>()};
  a.payload = j.at("payload");
  a.computed_at_micros = j.at("computed_at").get<std::int64_t>();
  return a;
}

Json to_json(const ComputationJob& job) {
  Json j{{"question_id", job.question_id},
         {"version", job.version},
         {"subject", job.subject_id},
         {"state", job_state_name(job.state)},
         {"attempt", job.attempt}};
  j["error"] = job.error ? Json(*job.error) : Json(nullptr);
  return j;
}

}  // namespace npds::qe
