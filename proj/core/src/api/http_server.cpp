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

#include "npds/api/http_server.hpp"

#include <httplib.h>

#include <charconv>
#include <sstream>

#include "npds/api/wire.hpp"

namespace npds::api {
namespace {

// An error raised while decoding a request, before any operation runs.
struct Rejected : Error {
  using Error::Error;
};

std::string bearer_of(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() > kPrefix.size() && header.compare(0, kPrefix.size(), kPrefix) == 0) {
    return header.substr(kPrefix.size());
  }
  return {};
}

Json json_body(const httplib::Request& req) {
  try {
    auto j = Json::parse(req.body);
    if (!j.is_object()) throw Rejected(Errc::kInvalidRequest, "body must be a JSON object");
    return j;
  } catch (const Json::exception& e) {
    throw Rejected(Errc::kInvalidRequest, std::string("malformed JSON body: ") + e.what());
  }
}

template <typename F>
auto decode(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Rejected(Errc::kInvalidRequest, e.what());
  } catch (const Rejected&) {
    throw;
  } catch (const Error& e) {
    throw Rejected(e.code(), e.what());
  }
}

std::optional<std::int64_t> int_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name)) return std::nullopt;
  const auto text = req.get_param_value(name);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size()) {
    throw Rejected(Errc::kInvalidRequest, "query parameter " + name + " must be an integer");
  }
  return v;
}

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, {{"error", e.code_name()}, {"message", e.what()}}, http_status(e.code()));
}

}  // namespace

int http_status(Errc code) {
  switch (code) {
    case Errc::kUnauthorized:
      return 401;
    case Errc::kScopeDenied:
    case Errc::kNotAuthorized:
      return 403;
    case Errc::kUnknownGrant:
    case Errc::kUnknownRecording:
    case Errc::kUnknownQuestion:
    case Errc::kUnknownSession:
    case Errc::kNoSuchAnswer:
    case Errc::kNotFound:
      return 404;
    case Errc::kAlreadyDecided:
    case Errc::kSessionMismatch:
    case Errc::kDependencyCycle:
      return 409;
    case Errc::kInternal:
      return 500;
    default:
      return 400;
  }
}

struct HttpServer::Impl {
  explicit Impl(PdsService& s) : service(s) { install_routes(); }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&,
                                     const std::string& bearer)>;

  httplib::Server::Handler wrap(std::string endpoint, Handler handler) {
    return [this, endpoint, handler](const httplib::Request& req, httplib::Response& res) {
      const auto bearer = bearer_of(req);
      try {
        handler(req, res, bearer);
      } catch (const Rejected& e) {
        send_error(res, service.reject_request(bearer, endpoint, e));
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, Error(Errc::kInternal, e.what()));
      }
    };
  }

  void install_routes();

  PdsService& service;
  httplib::Server server;
};

void HttpServer::Impl::install_routes() {
  auto& s = service;

  server.Post("/v1/recordings", wrap("POST /v1/recordings", [&s](auto& req, auto& res,
                                                                 auto& bearer) {
    const auto* data = reinterpret_cast<const std::uint8_t*>(req.body.data());
    const auto id = s.upload_recording(bearer, {data, req.body.size()});
    send_json(res, {{"recording_id", id}}, 201);
  }));

  server.Get("/v1/recordings", wrap("GET /v1/recordings", [&s](auto&, auto& res, auto& bearer) {
    Json list = Json::array();
    for (const auto& info : s.list_recordings(bearer)) list.push_back(to_json(info));
    send_json(res, {{"recordings", list}});
  }));

  server.Get("/v1/recordings/export",
             wrap("GET /v1/recordings/export", [&s](auto&, auto& res, auto& bearer) {
               const auto bytes = s.owner_export(bearer);
               res.set_content(std::string(bytes.begin(), bytes.end()),
                               "application/octet-stream");
             }));

  server.Get(R"(/v1/recordings/([^/]+)/raw)",
             wrap("GET /v1/recordings/{id}/raw", [&s](auto& req, auto& res, auto& bearer) {
               const auto bytes = s.raw_recording(bearer, req.matches[1].str());
               res.set_content(std::string(bytes.begin(), bytes.end()),
                               "application/octet-stream");
             }));

  server.Delete("/v1/recordings",
                wrap("DELETE /v1/recordings", [&s](auto& req, auto& res, auto& bearer) {
                  const auto selector = decode([&] {
                    const auto body = json_body(req);
                    DeleteSelector sel;
                    sel.all = body.value("all", false);
                    if (body.contains("recording_ids")) {
                      sel.recording_ids =
                          body["recording_ids"].template get<std::vector<std::string>>();
                    }
                    if (sel.all == body.contains("recording_ids")) {
                      throw Rejected(Errc::kInvalidRequest,
                                     "give exactly one of recording_ids or all:true");
                    }
                    return sel;
                  });
                  send_json(res, {{"deleted", s.owner_delete(bearer, selector)}});
                }));

  server.Post("/v1/grants", wrap("POST /v1/grants", [&s](auto& req, auto& res, auto& bearer) {
    auto [client, scopes] = decode([&] {
      const auto body = json_body(req);
      return std::pair{body.at("client_id").template get<std::string>(),
                       body.at("scopes").template get<std::set<std::string>>()};
    });
    send_json(res, to_json(s.request_grant(bearer, client, std::move(scopes))), 201);
  }));

  server.Get("/v1/grants", wrap("GET /v1/grants", [&s](auto&, auto& res, auto& bearer) {
    Json list = Json::array();
    for (const auto& g : s.list_grants(bearer)) list.push_back(to_json(g));
    send_json(res, {{"grants", list}});
  }));

  server.Post(R"(/v1/grants/([^/]+)/decision)",
              wrap("POST /v1/grants/{id}/decision", [&s](auto& req, auto& res, auto& bearer) {
                const bool approve =
                    decode([&] { return json_body(req).at("approve").template get<bool>(); });
                send_json(res, to_json(s.decide_grant(bearer, req.matches[1].str(), approve)));
              }));

  server.Delete(R"(/v1/grants/([^/]+))",
                wrap("DELETE /v1/grants/{id}", [&s](auto& req, auto& res, auto& bearer) {
                  send_json(res, to_json(s.revoke_grant(bearer, req.matches[1].str())));
                }));

  server.Get("/v1/questions", wrap("GET /v1/questions", [&s](auto&, auto& res, auto& bearer) {
    Json list = Json::array();
    for (const auto& q : s.list_questions(bearer)) list.push_back(qe::to_json(q));
    send_json(res, {{"questions", list}});
  }));

  server.Post("/v1/questions", wrap("POST /v1/questions", [&s](auto& req, auto& res,
                                                               auto& bearer) {
    auto question = decode([&] { return qe::question_from_json(json_body(req)); });
    send_json(res, to_json(s.install_question(bearer, std::move(question))));
  }));

  server.Get(R"(/v1/answers/([^/]+))",
             wrap("GET /v1/answers/{question_id}", [&s](auto& req, auto& res, auto& bearer) {
               const auto filter = decode([&] {
                 qe::AnswerFilter f;
                 f.from_micros = int_param(req, "from");
                 f.to_micros = int_param(req, "to");
                 if (req.has_param("subject")) {
                   std::set<std::string> ids;
                   std::stringstream list(req.get_param_value("subject"));
                   for (std::string id; std::getline(list, id, ',');) {
                     if (!id.empty()) ids.insert(id);
                   }
                   f.subject_ids = std::move(ids);
                 }
                 return f;
               });
               send_json(res, to_json(s.serve_answer(bearer, req.matches[1].str(), filter)));
             }));

  server.Post("/v1/compute/run", wrap("POST /v1/compute/run", [&s](auto&, auto& res,
                                                                   auto& bearer) {
    Json jobs = Json::array();
    for (const auto& job : s.run_compute(bearer)) jobs.push_back(qe::to_json(job));
    send_json(res, {{"jobs", jobs}, {"count", jobs.size()}});
  }));

  server.Get("/v1/audit", wrap("GET /v1/audit", [&s](auto& req, auto& res, auto& bearer) {
    const auto since = decode([&] { return int_param(req, "since").value_or(0); });
    Json entries = Json::array();
    for (const auto& e : s.audit_query(bearer, since)) entries.push_back(to_json(e));
    send_json(res, {{"entries", entries}});
  }));

  server.Post("/v1/aggregate/provision",
              wrap("POST /v1/aggregate/provision", [&s](auto& req, auto& res, auto& bearer) {
                const auto p = decode([&] { return provisioning_from_json(json_body(req)); });
                s.provision_aggregation(bearer, p);
                send_json(res, {{"session_id", p.session_id}, {"state", "PROVISIONED"}});
              }));

  server.Post("/v1/aggregate/sessions",
              wrap("POST /v1/aggregate/sessions", [&s](auto& req, auto& res, auto& bearer) {
                const auto a = decode([&] { return announcement_from_json(json_body(req)); });
                s.open_aggregation(bearer, a);
                send_json(res, {{"session_id", a.session_id}, {"state", "COLLECTING"}});
              }));

  server.Post(R"(/v1/aggregate/sessions/([^/]+)/contribute)",
              wrap("POST /v1/aggregate/sessions/{id}/contribute",
                   [&s](auto& req, auto& res, auto& bearer) {
                     send_json(res, to_json(s.contribute(bearer, req.matches[1].str())));
                   }));

  if (s.config().console_dir) server.set_mount_point("/console", *s.config().console_dir);

  auto fallback = [this](const httplib::Request& req, httplib::Response& res) {
    const auto error = service.reject_request(
        bearer_of(req), req.method + " " + req.path,
        Error(Errc::kNotFound, "no route for " + req.method + " " + req.path));
    send_error(res, error);
  };
  server.Get(".*", fallback);
  server.Post(".*", fallback);
  server.Put(".*", fallback);
  server.Patch(".*", fallback);
  server.Delete(".*", fallback);
  server.Options(".*", fallback);
}

HttpServer::HttpServer(PdsService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ < 0) {
    throw Error(Errc::kInternal, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port_;
}

void HttpServer::listen() {
  if (!impl_->server.listen_after_bind()) throw Error(Errc::kInternal, "server stopped with error");
}

void HttpServer::start() {
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace npds::api
