/*
 * Copyright 2026 The xp Authors.
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

// xp-server: serves explanation conversations over WebSocket and logs them
// to --data-dir. Prints "listening on <host>:<port>" once the socket is
// bound, which matters with --bind <host>:0.

#include <cstdint>
#include <iostream>
#include <memory>
#include <string>

#include "runtime.hpp"
#include "ws_server.hpp"
#include "xp/error.hpp"
#include "xp/iff/iff.hpp"
#include "xp/session/store.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Explanation conversation server"};
  std::string iff_path;
  std::string data_dir;
  std::string bind = "127.0.0.1:8080";
  std::string group = "random";
  std::uint64_t seed = 0;
  int estimated_minutes = 15;
  std::string persona;
  xp::tools::ExplainerOptions explainer;
  app.add_option("--iff", iff_path, "IFF document")->required()->check(CLI::ExistingFile);
  app.add_option("--data-dir", data_dir, "Session log directory")->required();
  app.add_option("--bind", bind, "Listen address host:port")->capture_default_str();
  app.add_option("--group", group, "Study group assignment")
      ->check(CLI::IsMember({"a", "b", "random"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "Seed for group assignment, targets and explainers")->capture_default_str();
  app.add_option("--estimated-minutes", estimated_minutes, "Expected session length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--persona", persona, "User group used when the client does not choose one");
  xp::tools::add_explainer_flags(app, explainer);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw xp::Error(xp::ErrorCode::kSchemaError, "--bind expects host:port");
    const std::string host = bind.substr(0, colon);
    const auto port = static_cast<std::uint16_t>(std::stoul(bind.substr(colon + 1)));

    explainer.seed = seed;
    xp::session::ServiceConfig config;
    config.graph = std::make_shared<const xp::iff::IffGraph>(xp::iff::load_iff_file(iff_path));
    config.explainer = xp::tools::make_explainer(explainer);
    config.default_persona = persona;
    config.group_mode = *xp::session::parse_group_mode(group);
    config.seed = seed;
    config.estimated_minutes = estimated_minutes;
    xp::session::SessionService service(config, std::make_shared<xp::session::FileStore>(data_dir));

    xp::tools::WsServer server(service, host, port);
    std::cout << "listening on " << host << ":" << server.port() << std::endl;
    server.run();
    return 0;
  } catch (const std::exception& e) {
    return xp::tools::report_error(e);
  }
}
