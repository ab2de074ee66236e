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

#ifndef NPDS_API_CONFIG_HPP_
#define NPDS_API_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace npds::api {

// Server configuration, read from one JSON file:
//
//   {
//     "listen": "127.0.0.1:8470",
//     "storage": "/var/lib/npds",        // directory, or ":memory:"
//     "owner_credential": "...",         // at least 16 characters
//     "schedule_tick_seconds": 60,
//     "token_ttl_seconds": 2592000,      // optional
//     "console_dir": "/usr/share/npds/console"  // optional
//   }
struct PdsConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8470;
  std::string storage = ":memory:";
  std::string owner_credential;
  std::int64_t schedule_tick_seconds = 60;
  std::int64_t token_ttl_seconds = 30 * 24 * 3600;
  std::optional<std::string> console_dir;

  // SQLite path derived from `storage`.
  std::string database_path() const;
};

inline constexpr std::size_t kMinOwnerCredentialLength = 16;

// Throws Errc::kInvalidArgument.
PdsConfig config_from_json(const nlohmann::json& j);
PdsConfig load_config(const std::string& path);

}  // namespace npds::api

#endif  // NPDS_API_CONFIG_HPP_
