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

#ifndef NPDS_API_WIRE_HPP_
#define NPDS_API_WIRE_HPP_

#include <nlohmann/json.hpp>

#include "npds/agg/aggregator.hpp"
#include "npds/api/grants.hpp"
#include "npds/api/service.hpp"
#include "npds/qe/engine.hpp"
#include "npds/qe/stores.hpp"

// JSON shapes shared by the HTTP server and client.
namespace npds::api {

using Json = nlohmann::json;

Json to_json(const qe::RecordingInfo& info);
qe::RecordingInfo recording_info_from_json(const Json& j);

Json to_json(const qe::InstallResult& result);
Json to_json(const AnswerPage& page);
Json to_json(const GrantStore::Decision& decision);
Grant grant_from_json(const Json& j);

// u64 quantities travel as decimal strings.
Json to_json(const agg::SessionAnnouncement& a);
agg::SessionAnnouncement announcement_from_json(const Json& j);
Json to_json(const agg::MaskedShare& share);
agg::MaskedShare share_from_json(const Json& j);

// Accepts a decimal string or a non-negative JSON integer.
std::uint64_t u64_from_json(const Json& j);

}  // namespace npds::api

#endif  // NPDS_API_WIRE_HPP_
