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

#include "npds/api/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "npds/error.hpp"

namespace npds::api {
namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(Errc::kInvalidArgument, "config: " + what);
}

}  // namespace

std::string PdsConfig::database_path() const {
  if (storage == ":memory:") return storage;
  return (std::filesystem::path(storage) / "pds.sqlite").string();
}

PdsConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad("expected a JSON object");
  PdsConfig c;
  try {
    if (j.contains("listen")) {
      const auto listen = j.at("listen").get<std::string>();
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos || colon == 0) bad("listen must be host:port");
      c.listen_host = listen.substr(0, colon);
      const auto port = listen.substr(colon + 1);
      auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), c.listen_port);
      if (ec != std::errc() || p != port.data() + port.size() || c.listen_port < 0 ||
          c.listen_port > 65535) {
        bad("invalid port '" + port + "'");
      }
    }
    if (j.contains("storage")) c.storage = j.at("storage").get<std::string>();
    c.owner_credential = j.at("owner_credential").get<std::string>();
    if (j.contains("schedule_tick_seconds")) {
      c.schedule_tick_seconds = j.at("schedule_tick_seconds").get<std::int64_t>();
    }
    if (j.contains("token_ttl_seconds")) {
      c.token_ttl_seconds = j.at("token_ttl_seconds").get<std::int64_t>();
    }
    if (j.contains("console_dir")) c.console_dir = j.at("console_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    bad(e.what());
  }
  if (c.owner_credential.size() < kMinOwnerCredentialLength) {
    bad("owner_credential must be at least 16 characters");
  }
  if (c.schedule_tick_seconds <= 0) bad("schedule_tick_seconds must be positive");
  if (c.token_ttl_seconds <= 0) bad("token_ttl_seconds must be positive");
  if (c.storage.empty()) bad("storage must not be empty");
  return c;
}

PdsConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace npds::api
