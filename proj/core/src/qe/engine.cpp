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

#include "npds/qe/engine.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>

#include "npds/error.hpp"
#include "npds/qe/catalog.hpp"
#include "npds/qe/drowsy_places.hpp"
#include "npds/scopes.hpp"

namespace npds::qe {
namespace {

bool valid_identifier(std::string_view s) {
  if (s.empty() || s.size() > 128) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == '.' || c == ':';
  });
}

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(err->code_name()) + ": " + err->what();
  }
  return std::string("Internal: ") + e.what();
}

}  // namespace

QuestionEngine::QuestionEngine(sql::Database& db, RecordingStore& recordings,
                               AnswerStore& answers)
    : db_(db), recordings_(recordings), answers_(answers) {
  db_.exec(R"sql(
    CREATE TABLE IF NOT EXISTS questions (
      question_id TEXT PRIMARY KEY,
      version INTEGER NOT NULL,
      definition TEXT NOT NULL
    );
    CREATE TABLE IF NOT EXISTS jobs (
      question_id TEXT NOT NULL,
      version INTEGER NOT NULL,
      subject_id TEXT NOT NULL,
      state TEXT NOT NULL,
      attempt INTEGER NOT NULL,
      error TEXT,
      last_run INTEGER,
      PRIMARY KEY (question_id, version, subject_id)
    );
  )sql");
}

std::vector<Question> QuestionEngine::list_questions() {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT definition FROM questions ORDER BY question_id");
  std::vector<Question> out;
  while (stmt.step()) out.push_back(question_from_json(Json::parse(stmt.column_text(0))));
  return out;
}

std::optional<Question> QuestionEngine::find_question(const std::string& question_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare("SELECT definition FROM questions WHERE question_id = ?1");
  stmt.bind(1, question_id);
  if (!stmt.step()) return std::nullopt;
  return question_from_json(Json::parse(stmt.column_text(0)));
}

std::set<std::string> QuestionEngine::question_scopes() {
  std::set<std::string> out;
  for (const auto& q : list_questions()) out.insert(q.required_scope);
  return out;
}

InstallResult QuestionEngine::install_question(Question q) {
  auto bad = [&](const std::string& what) {
    throw Error(Errc::kInvalidQuestion, what);
  };
  if (!valid_identifier(q.question_id)) bad("invalid question id '" + q.question_id + "'");
  if (q.required_scope.empty()) q.required_scope = "q:" + q.question_id;
  if (!valid_identifier(q.required_scope) || scopes::is_reserved(q.required_scope)) {
    bad("invalid required scope '" + q.required_scope + "'");
  }
  if (q.schedule_period_seconds <= 0) bad("schedule period must be positive");
  if (q.inputs.empty()) bad("question declares no inputs");
  {
    auto sorted = q.inputs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      bad("duplicate input");
    }
  }

  sql::Transaction tx(db_);
  if (!is_known_schema(q.output_schema_id)) {
    throw Error(Errc::kUnknownSchema,
                "output schema '" + q.output_schema_id + "' is not registered");
  }
  for (const auto& dep : q.dependencies()) {
    if (dep == q.question_id) {
      throw Error(Errc::kDependencyCycle, q.question_id + " depends on itself");
    }
    if (!find_question(dep)) {
      throw Error(Errc::kUnknownDependency,
                  q.question_id + " depends on uninstalled question '" + dep + "'");
    }
  }

  // Reject if any dependency (transitively) already depends on q.
  std::map<std::string, std::vector<std::string>> graph;
  for (const auto& existing : list_questions()) graph[existing.question_id] = existing.dependencies();
  graph[q.question_id] = q.dependencies();
  std::vector<std::string> stack = q.dependencies();
  std::set<std::string> seen;
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    if (id == q.question_id) {
      throw Error(Errc::kDependencyCycle,
                  "installing " + q.question_id + " would create a dependency cycle");
    }
    if (!seen.insert(id).second) continue;
    for (const auto& next : graph[id]) stack.push_back(next);
  }

  validate_question_shape(q, [this](const std::string& id) { return find_question(id); });

  InstallResult result;
  auto existing = find_question(q.question_id);
  if (existing && existing->same_definition(q)) {
    result.question = *existing;
    tx.commit();
    return result;
  }
  q.version = existing ? existing->version + 1 : 1;
  db_.prepare("INSERT OR REPLACE INTO questions VALUES (?1, ?2, ?3)")
      .bind_all(q.question_id, q.version, to_json(q).dump())
      .run();
  if (existing) {
    // Unfinished work for the superseded version is abandoned; its answers
    // stay for audit but are no longer served.
    db_.prepare("DELETE FROM jobs WHERE question_id = ?1 AND version <> ?2")
        .bind_all(q.question_id, q.version)
        .run();
  }
  if (q.reads_raw()) {
    for (const auto& rec : recordings_.list()) {
      save_job(ComputationJob{q.question_id, q.version, rec.recording_id,
                              JobState::kPending, 0, std::nullopt, std::nullopt});
      ++result.jobs_enqueued;
    }
  }
  tx.commit();
  result.question = q;
  result.version_changed = true;
  return result;
}

void QuestionEngine::on_recording_added(const std::string& recording_id) {
  sql::Transaction tx(db_);
  for (const auto& q : list_questions()) {
    if (!q.reads_raw() || load_job(q, recording_id)) continue;
    save_job(ComputationJob{q.question_id, q.version, recording_id, JobState::kPending, 0,
                            std::nullopt, std::nullopt});
  }
  tx.commit();
}

std::size_t QuestionEngine::on_recordings_deleted(const std::vector<std::string>& recording_ids) {
  sql::Transaction tx(db_);
  const auto removed = answers_.remove_derived_from(recording_ids);
  auto by_subject = db_.prepare("DELETE FROM jobs WHERE subject_id = ?1");
  for (const auto& id : recording_ids) {
    by_subject.reset();
    by_subject.bind(1, id).run();
  }
  auto by_key = db_.prepare(
      "DELETE FROM jobs WHERE question_id = ?1 AND version = ?2 AND subject_id = ?3");
  for (const auto& [question_id, version, subject_id] : removed.keys) {
    by_key.reset();
    by_key.bind_all(question_id, version, subject_id).run();
  }
  tx.commit();
  return removed.answers;
}

std::optional<ComputationJob> QuestionEngine::load_job(const Question& q,
                                                       const std::string& subject_id) {
  auto lock = db_.lock();
  auto stmt = db_.prepare(
      "SELECT state, attempt, error, last_run FROM jobs "
      "WHERE question_id = ?1 AND version = ?2 AND subject_id = ?3");
  stmt.bind_all(q.question_id, q.version, subject_id);
  if (!stmt.step()) return std::nullopt;
  ComputationJob job{q.question_id, q.version, subject_id,
                     job_state_from_name(stmt.column_text(0)),
                     static_cast<int>(stmt.column_int64(1)), std::nullopt, std::nullopt};
  if (!stmt.column_is_null(2)) job.error = stmt.column_text(2);
  if (!stmt.column_is_null(3)) job.last_run_micros = stmt.column_int64(3);
  return job;
}

void QuestionEngine::save_job(const ComputationJob& job) {
  auto lock = db_.lock();
  db_.prepare("INSERT OR REPLACE INTO jobs VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)")
      .bind_all(job.question_id, job.version, job.subject_id,
                std::string(job_state_name(job.state)), job.attempt, job.error,
                job.last_run_micros)
      .run();
}

std::vector<ComputationJob> QuestionEngine::list_jobs() {
  auto lock = db_.lock();
  std::vector<ComputationJob> out;
  auto stmt = db_.prepare(
      "SELECT question_id, version, subject_id, state, attempt, error, last_run FROM jobs "
      "ORDER BY question_id, version, subject_id");
  while (stmt.step()) {
    ComputationJob job{stmt.column_text(0), static_cast<int>(stmt.column_int64(1)),
                       stmt.column_text(2), job_state_from_name(stmt.column_text(3)),
                       static_cast<int>(stmt.column_int64(4)), std::nullopt, std::nullopt};
    if (!stmt.column_is_null(5)) job.error = stmt.column_text(5);
    if (!stmt.column_is_null(6)) job.last_run_micros = stmt.column_int64(6);
    out.push_back(std::move(job));
  }
  return out;
}

std::vector<Question> QuestionEngine::topological_order() {
  const auto questions = list_questions();
  std::map<std::string, Question> by_id;
  std::map<std::string, std::size_t> pending;
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto& q : questions) {
    by_id.emplace(q.question_id, q);
    pending[q.question_id] = q.dependencies().size();
    for (const auto& dep : q.dependencies()) dependents[dep].push_back(q.question_id);
  }
  std::set<std::string> ready;
  for (const auto& [id, n] : pending) {
    if (n == 0) ready.insert(id);
  }
  std::vector<Question> order;
  while (!ready.empty()) {
    const auto id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(by_id.at(id));
    for (const auto& dependent : dependents[id]) {
      if (--pending[dependent] == 0) ready.insert(dependent);
    }
  }
  return order;
}

std::vector<Subject> QuestionEngine::subjects_for(const Question& q) {
  std::vector<Subject> out;
  if (q.reads_raw()) {
    for (const auto& rec : recordings_.list()) out.push_back(rec.subject());
    return out;
  }
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  bool any = false;
  for (const auto& dep_id : q.dependencies()) {
    auto dep = find_question(dep_id);
    if (!dep) continue;
    for (const auto& a : answers_.latest_per_subject(dep->question_id, dep->version)) {
      lo = std::min(lo, a.subject.start_micros);
      hi = std::max(hi, a.subject.end_micros);
      any = true;
    }
  }
  if (any) out.push_back(Subject{std::string(kAllTimeWindowId), lo, hi});
  return out;
}

QuestionEngine::Computed QuestionEngine::compute(const Question& q, const Subject& subject) {
  if (q.reads_raw()) {
    const auto rec = recordings_.load(subject.id);
    return Computed{subject, compute_raw_payload(q, rec), {subject.id}};
  }
  // drowsy_places: one drowsiness dependency, joined with recording locations.
  const auto dep = find_question(q.dependencies().front());
  if (!dep) throw Error(Errc::kUnknownDependency, "dependency vanished");
  std::vector<DrowsinessObservation> observations;
  Computed out{subject, Json(), {}};
  for (const auto& a : answers_.latest_per_subject(dep->question_id, dep->version)) {
    DrowsinessObservation obs;
    obs.ratio = a.payload.at("ratio").get<double>();
    if (auto info = recordings_.info(a.subject.id)) obs.location = info->location;
    observations.push_back(obs);
    out.sources.insert(out.sources.end(), a.sources.begin(), a.sources.end());
  }
  std::size_t k = 5;
  if (auto it = q.params.find("k"); it != q.params.end()) k = std::stoul(it->second);
  out.payload = drowsy_places_payload(compute_drowsy_places(observations, k));
  std::sort(out.sources.begin(), out.sources.end());
  out.sources.erase(std::unique(out.sources.begin(), out.sources.end()), out.sources.end());
  return out;
}

Answer QuestionEngine::store_answer_locked(const Question& q, const Subject& subject,
                                           Json payload, std::int64_t computed_at_micros,
                                           std::vector<std::string> sources) {
  validate_payload(q.output_schema_id, payload);
  std::sort(sources.begin(), sources.end());
  if (auto latest = answers_.latest(q.question_id, q.version, subject.id)) {
    if (latest->payload == payload && latest->sources == sources &&
        latest->subject == subject) {
      return *latest;
    }
  }
  Answer a;
  a.question_id = q.question_id;
  a.version = q.version;
  a.subject = subject;
  a.payload = std::move(payload);
  a.computed_at_micros = computed_at_micros;
  a.sources = std::move(sources);
  a.answer_id = answers_.insert(a);
  return a;
}

Answer QuestionEngine::store_answer(const std::string& question_id, const Subject& subject,
                                    Json payload, std::int64_t computed_at_micros,
                                    std::vector<std::string> sources) {
  sql::Transaction tx(db_);
  auto q = find_question(question_id);
  if (!q) throw Error(Errc::kUnknownQuestion, "no question '" + question_id + "'");
  auto a = store_answer_locked(*q, subject, std::move(payload), computed_at_micros,
                               std::move(sources));
  tx.commit();
  return a;
}

std::vector<ComputationJob> QuestionEngine::run_due_jobs(std::int64_t now_micros,
                                                         const SweepObserver& observer) {
  std::lock_guard sweep(sweep_mutex_);
  std::vector<ComputationJob> results;
  for (const auto& q : topological_order()) {
    const std::int64_t period_micros = q.schedule_period_seconds * 1'000'000;
    for (const auto& subject : subjects_for(q)) {
      auto job = load_job(q, subject.id)
                     .value_or(ComputationJob{q.question_id, q.version, subject.id,
                                              JobState::kPending, 0, std::nullopt,
                                              std::nullopt});
      const bool settled = job.state == JobState::kDone || job.state == JobState::kFailed;
      if (settled && job.last_run_micros && now_micros - *job.last_run_micros < period_micros) {
        continue;
      }
      job.state = JobState::kRunning;
      ++job.attempt;
      job.error.reset();
      save_job(job);
      try {
        auto computed = compute(q, subject);
        sql::Transaction tx(db_);
        store_answer_locked(q, computed.subject, std::move(computed.payload), now_micros,
                            std::move(computed.sources));
        job.state = JobState::kDone;
        job.last_run_micros = now_micros;
        save_job(job);
        tx.commit();
      } catch (const std::exception& e) {
        job.state = JobState::kFailed;
        job.error = describe(e);
        job.last_run_micros = now_micros;
        save_job(job);
      }
      results.push_back(job);
      if (observer) observer(job);
    }
  }
  return results;
}

std::vector<Answer> QuestionEngine::get_answers(const std::string& question_id,
                                                const AnswerFilter& filter) {
  auto q = find_question(question_id);
  if (!q) throw Error(Errc::kUnknownQuestion, "no question '" + question_id + "'");
  return answers_.latest_per_subject(q->question_id, q->version, filter);
}

}  // namespace npds::qe
