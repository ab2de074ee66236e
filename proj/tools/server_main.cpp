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

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

#include "npds/api/config.hpp"
#include "npds/api/http_server.hpp"
#include "npds/api/service.hpp"
#include "npds/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Personal data store server", "npds-server"};
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")->required();
  CLI11_PARSE(app, argc, argv);

  // Handled by a dedicated thread via sigwait.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    const auto config = npds::api::load_config(config_path);
    npds::api::PdsService service(config);
    npds::api::HttpServer server(service);
    const int port = server.bind(config.listen_host, config.listen_port);
    npds::api::Scheduler scheduler(service);
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      server.stop();
    });
    std::cerr << "npds-server listening on " << config.listen_host << ":" << port << '\n';
    server.listen();
    scheduler.stop();
    if (waiter.joinable()) {
      pthread_kill(waiter.native_handle(), SIGTERM);
      waiter.join();
    }
  } catch (const npds::Error& e) {
    std::cerr << "npds-server: " << e.code_name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "npds-server: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
