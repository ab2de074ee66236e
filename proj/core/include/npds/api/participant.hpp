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

#ifndef NPDS_API_PARTICIPANT_HPP_
#define NPDS_API_PARTICIPANT_HPP_

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "npds/agg/aggregator.hpp"
#include "npds/agg/masking.hpp"
#include "npds/sql/database.hpp"

namespace npds::api {

// Out-of-band session setup handed to one PDS by its owner.
struct Provisioning {
  std::string session_id;
  std::string participant_id;
  std::vector<std::string> participants;
  // One seed per peer participant id.
  std::map<std::string, agg::PairSeed> pair_seeds;
};

nlohmann::json to_json(const Provisioning& p);
// Throws Errc::kInvalidRequest.
Provisioning provisioning_from_json(const nlohmann::json& j);

struct LocalValue {
  double value = 0.0;
  std::vector<std::string> sources;
};

// Resolves (question_id, field) to this PDS's plaintext contribution. Throws
// Errc::kNoSuchAnswer.
using LocalValueFn =
    std::function<LocalValue(const std::string& question_id, const std::string& field)>;

// The PDS side of a masked aggregation session.
struct Contribution {
  agg::MaskedShare share;
  std::vector<std::string> sources;  // recordings behind the share
};

class ParticipantStore {
 public:
  explicit ParticipantStore(sql::Database& db);

  // Throws Errc::kInvalidRequest when the setup is inconsistent.
  void provision(const Provisioning& p);

  // Commits to the announced session. Throws Errc::kUnknownSession (not
  // provisioned), Errc::kSessionMismatch (participant commitment or an
  // earlier announcement differs), Errc::kInvalidRequest (unsupported scale).
  void open(const agg::SessionAnnouncement& announcement);

  // The first call computes and stores the masked share; later calls return
  // it unchanged. Throws Errc::kUnknownSession for sessions never opened.
  Contribution contribute(const std::string& session_id, const LocalValueFn& local_value);

  // Forgets sessions whose stored share used any of the recordings, so no
  // share derived from deleted data is ever released again.
  std::size_t forget_sources(const std::vector<std::string>& recording_ids);

 private:
  std::optional<Provisioning> load_provisioning(const std::string& session_id);

  sql::Database& db_;
  std::mutex mutex_;
};

}  // namespace npds::api

#endif  // NPDS_API_PARTICIPANT_HPP_
