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

// WebSocket front end for a SessionService. Each connection runs on its own
// thread and carries at most one session, so messages of a session are
// handled in arrival order.
//
// A connection starts a session with a "start" message, or resumes one by
// upgrading on "/?session=<id>&token=<token>".

#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include <boost/asio/ip/tcp.hpp>

#include "xp/session/service.hpp"

namespace xp::tools {

class WsServer {
 public:
  WsServer(session::SessionService& service, const std::string& host, std::uint16_t port);

  // Bound port; differs from the requested one when that was 0.
  std::uint16_t port() const;

  // Serves until stop() or SIGINT/SIGTERM.
  void run();
  void stop();

 private:
  void serve(boost::asio::ip::tcp::socket socket);

  session::SessionService& service_;
  boost::asio::io_context ioc_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::atomic<std::uint64_t> anonymous_{0};
};

}  // namespace xp::tools
