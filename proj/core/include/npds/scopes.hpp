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

#ifndef NPDS_SCOPES_HPP_
#define NPDS_SCOPES_HPP_

#include <array>
#include <string_view>

namespace npds::scopes {

inline constexpr std::string_view kUpload = "upload";
inline constexpr std::string_view kOwnerExport = "owner:export";
inline constexpr std::string_view kOwnerDelete = "owner:delete";
inline constexpr std::string_view kAggregateParticipate = "aggregate:participate";

inline constexpr std::array<std::string_view, 4> kReserved = {
    kUpload, kOwnerExport, kOwnerDelete, kAggregateParticipate};

inline bool is_reserved(std::string_view scope) {
  for (auto s : kReserved) {
    if (s == scope) return true;
  }
  return false;
}

}  // namespace npds::scopes

#endif  // NPDS_SCOPES_HPP_
