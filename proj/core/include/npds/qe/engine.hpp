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

#ifndef NPDS_QE_ENGINE_HPP_
#define NPDS_QE_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "npds/qe/question.hpp"
#include "npds/qe/stores.hpp"
#include "npds/sql/database.hpp"

namespace npds::qe {

struct InstallResult {
  Question question;
  bool version_changed = false;
  // Jobs created in PENDING state for existing subjects.
  std::size_t jobs_enqueued = 0;
};

// Called after each job finishes (DONE or FAILED) within a sweep.
using SweepObserver = std::function<void(const ComputationJob&)>;

// Question registry, periodic scheduler and answer access. The sweep runs
// questions in dependency order; each answer is committed atomically together
// with its job state, so an interrupted sweep can simply be re-run.
class QuestionEngine {
 public:
  QuestionEngine(sql::Database& db, RecordingStore& recordings, AnswerStore& answers);

  // Throws Errc::kUnknownSchema, Errc::kUnknownDependency,
  // Errc::kDependencyCycle, Errc::kInvalidQuestion.
  InstallResult install_question(Question q);

  std::vector<Question> list_questions();
  std::optional<Question> find_question(const std::string& question_id);
  // Scope strings required by installed questions.
  std::set<std::string> question_scopes();

  // Enqueues raw-input questions for a newly stored recording.
  void on_recording_added(const std::string& recording_id);
  // Drops answers about or derived from the recordings and forgets the
  // matching jobs. Returns the number of answers removed.
  std::size_t on_recordings_deleted(const std::vector<std::string>& recording_ids);

  // Computes every due (question, subject) pair. A job is due when it never
  // completed or its last run is at least schedule_period_seconds old.
  // Per-job failures are recorded on the job; the sweep continues.
  std::vector<ComputationJob> run_due_jobs(std::int64_t now_micros,
                                           const SweepObserver& observer = {});

  // Latest answer per subject of the current version. Throws
  // Errc::kUnknownQuestion.
  std::vector<Answer> get_answers(const std::string& question_id,
                                  const AnswerFilter& filter = {});

  // Validates and persists an answer for the question's current version.
  // Identical payloads (and sources) for the same subject are not duplicated;
  // the existing answer is returned instead.
  Answer store_answer(const std::string& question_id, const Subject& subject,
                      Json payload, std::int64_t computed_at_micros,
                      std::vector<std::string> sources);

  std::vector<ComputationJob> list_jobs();

 private:
  std::vector<Question> topological_order();
  std::vector<Subject> subjects_for(const Question& q);
  std::optional<ComputationJob> load_job(const Question& q, const std::string& subject_id);
  void save_job(const ComputationJob& job);
  Answer store_answer_locked(const Question& q, const Subject& subject, Json payload,
                             std::int64_t computed_at_micros,
                             std::vector<std::string> sources);
  // Payload, subject (possibly widened) and sources for one job.
  struct Computed {
    Subject subject;
    Json payload;
    std::vector<std::string> sources;
  };
  Computed compute(const Question& q, const Subject& subject);

  sql::Database& db_;
  RecordingStore& recordings_;
  AnswerStore& answers_;
  std::mutex sweep_mutex_;
};

}  // namespace npds::qe

#endif  // NPDS_QE_ENGINE_HPP_
