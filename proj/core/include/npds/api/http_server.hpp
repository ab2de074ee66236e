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

#ifndef NPDS_API_HTTP_SERVER_HPP_
#define NPDS_API_HTTP_SERVER_HPP_

#include <memory>
#include <string>
#include <thread>

#include "npds/api/service.hpp"
#include "npds/error.hpp"

namespace npds::api {

// HTTP status for an error code.
int http_status(Errc code);

// JSON/HTTP front end of a PdsService. Routes:
//
//   POST   /v1/recordings                      binary upload -> 201 {recording_id}
//   GET    /v1/recordings                      owner: stored recording metadata
//   GET    /v1/recordings/export               owner:export, concatenated files
//   GET    /v1/recordings/{id}/raw             owner:export, one stored file
//   DELETE /v1/recordings                      {recording_ids:[..]} | {all:true}
//   POST   /v1/grants                          {client_id, scopes} -> 201 grant
//   GET    /v1/grants                          owner
//   POST   /v1/grants/{id}/decision            {approve} -> {grant, access_token?}
//   DELETE /v1/grants/{id}                     owner: revoke
//   GET    /v1/questions, POST /v1/questions
//   GET    /v1/answers/{question_id}?from=&to=&subject=a,b
//   POST   /v1/compute/run                     owner
//   GET    /v1/audit?since=                    owner
//   POST   /v1/aggregate/provision             owner
//   POST   /v1/aggregate/sessions              aggregate:participate
//   POST   /v1/aggregate/sessions/{id}/contribute
//
// Errors are {"error": <code name>, "message": ...}. Unknown routes are
// audited and answered with NotFound.
class HttpServer {
 public:
  explicit HttpServer(PdsService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Serves on the calling thread until stop().
  void listen();
  // Serves on a background thread.
  void start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace npds::api

#endif  // NPDS_API_HTTP_SERVER_HPP_
