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

#include "ws_server.hpp"

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <boost/asio/signal_set.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "xp/error.hpp"
#include "xp/session/wire.hpp"

namespace xp::tools {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;

namespace {

std::map<std::string, std::string> query_params(const std::string& target) {
  std::map<std::string, std::string> out;
  const auto q = target.find('?');
  if (q == std::string::npos) return out;
  std::istringstream rest(target.substr(q + 1));
  std::string pair;
  while (std::getline(rest, pair, '&')) {
    const auto eq = pair.find('=');
    if (eq != std::string::npos) out[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return out;
}

json error_envelope(std::string_view code, const std::string& message) {
  return session::server_envelope(bt::OutMessage{
      "protocol_error",
      {{"code", code}, {"message", message}, {"phase", nullptr}, {"expected", json::array()}, {"options", json::array()}}});
}

}  // namespace

WsServer::WsServer(session::SessionService& service, const std::string& host, std::uint16_t port)
    : service_(service), acceptor_(ioc_, tcp::endpoint(asio::ip::make_address(host), port)) {}

std::uint16_t WsServer::port() const { return acceptor_.local_endpoint().port(); }

void WsServer::run() {
  asio::signal_set signals(ioc_, SIGINT, SIGTERM);
  signals.async_wait([this](const boost::system::error_code&, int) { stop(); });

  std::function<void()> accept = [&] {
    acceptor_.async_accept([&](const boost::system::error_code& ec, tcp::socket socket) {
      if (ec) return;
      std::thread([this, s = std::move(socket)]() mutable { serve(std::move(s)); }).detach();
      accept();
    });
  };
  accept();
  ioc_.run();
}

void WsServer::stop() {
  asio::post(ioc_, [this] {
    boost::system::error_code ignored;
    acceptor_.close(ignored);
    ioc_.stop();
  });
}

void WsServer::serve(tcp::socket socket) {
  try {
    websocket::stream<tcp::socket> ws(std::move(socket));
    beast::flat_buffer buffer;
    http::request<http::string_body> request;
    http::read(ws.next_layer(), buffer, request);
    if (!websocket::is_upgrade(request)) {
      http::response<http::string_body> res{http::status::bad_request, request.version()};
      res.set(http::field::content_type, "text/plain");
      res.body() = "websocket upgrade required\n";
      res.prepare_payload();
      http::write(ws.next_layer(), res);
      return;
    }

    std::optional<std::string> session_id;
    const auto params = query_params(std::string(request.target()));
    if (params.contains("session")) {
      if (!service_.authorize(params.at("session"), params.count("token") ? params.at("token") : "")) {
        http::response<http::string_body> res{http::status::unauthorized, request.version()};
        res.body() = "unknown session or bad token\n";
        res.prepare_payload();
        http::write(ws.next_layer(), res);
        return;
      }
      session_id = params.at("session");
    }
    ws.accept(request);
    ws.text(true);

    auto send = [&](const std::vector<json>& messages) {
      for (const auto& m : messages) ws.write(asio::buffer(m.dump()));
    };
    bool done = false;
    while (!done) {
      buffer.consume(buffer.size());
      ws.read(buffer);
      const std::string text = beast::buffers_to_string(buffer.data());
      std::vector<json> out;
      try {
        if (!session_id) {
          const auto msg = session::parse_client_message(text);
          if (msg.type != "start") {
            out.push_back(error_envelope("not_started", "send a start message first"));
          } else {
            std::string participant = msg.payload.value("participant", std::string{});
            if (participant.empty()) participant = "anon-" + std::to_string(++anonymous_);
            auto started = service_.start_session(participant);
            session_id = started.session_id;
            out = std::move(started.messages);
          }
        } else {
          out = service_.handle_client_message(*session_id, std::string_view(text));
        }
      } catch (const Error& e) {
        out.push_back(error_envelope(error_code_name(e.code()), e.what()));
      }
      for (const auto& m : out) done = done || m.value("type", "") == "bye";
      send(out);
    }
    ws.close(websocket::close_code::normal);
  } catch (const beast::system_error& e) {
    if (e.code() != websocket::error::closed && e.code() != asio::error::eof &&
        e.code() != asio::error::connection_reset) {
      std::cerr << "connection error: " << e.code().message() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "connection error: " << e.what() << "\n";
  }
}

}  // namespace xp::tools
