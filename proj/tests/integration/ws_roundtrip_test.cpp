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

// Runs xp-server on an ephemeral port and talks to it over WebSocket the
// way a browser client would: every message sent is taken from the last
// menu the server offered.

#include <csignal>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "xp/rng.hpp"
#include "xp/session/store.hpp"
#include "xp/session/wire.hpp"

namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;

// Child process running the server; killed on destruction.
class ServerProcess {
 public:
  ServerProcess(const std::filesystem::path& data_dir, const std::string& group) {
    int fds[2];
    if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
    pid_ = ::fork();
    if (pid_ == 0) {
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      ::close(fds[1]);
      const std::string iff = xp::testing::data_path("iff/loan_approval.iff.json").string();
      const std::string dir = data_dir.string();
      ::execl(XP_SERVER_BINARY, XP_SERVER_BINARY, "--iff", iff.c_str(), "--data-dir", dir.c_str(), "--bind",
              "127.0.0.1:0", "--group", group.c_str(), "--seed", "3", static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(fds[1]);
    out_ = ::fdopen(fds[0], "r");
    char line[256];
    if (!out_ || !std::fgets(line, sizeof line, out_)) throw std::runtime_error("server printed nothing");
    const std::string text(line);
    const auto colon = text.rfind(':');
    if (text.rfind("listening on ", 0) != 0 || colon == std::string::npos) {
      throw std::runtime_error("unexpected server output: " + text);
    }
    port_ = std::stoi(text.substr(colon + 1));
  }

  ~ServerProcess() {
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
    if (out_) std::fclose(out_);
  }

  ServerProcess(const ServerProcess&) = delete;
  ServerProcess& operator=(const ServerProcess&) = delete;

  int port() const { return port_; }

 private:
  pid_t pid_ = -1;
  std::FILE* out_ = nullptr;
  int port_ = 0;
};

class Connection {
 public:
  Connection(int port, const std::string& target = "/") : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1:" + std::to_string(port), target);
    ws_.text(true);
  }

  void send(const json& message) { ws_.write(asio::buffer(message.dump())); }

  json receive() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

  // Reads until a message of one of `types` arrives; returns everything read.
  std::vector<json> receive_until(const std::vector<std::string>& types) {
    std::vector<json> out;
    for (;;) {
      out.push_back(receive());
      const std::string type = out.back().at("type");
      for (const auto& t : types) {
        if (type == t) return out;
      }
    }
  }

  // True once the server has closed the socket.
  bool closed_by_server() {
    beast::flat_buffer buffer;
    beast::error_code ec;
    ws_.read(buffer, ec);
    return ec == websocket::error::closed || ec == asio::error::eof;
  }

 private:
  asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

json envelope(const std::string& type, json payload = json::object()) {
  return xp::session::client_envelope(type, std::move(payload));
}

// Options the client may send, as a browser would collect them.
json options_of(const json& message) {
  const auto& p = message.at("payload");
  json out = json::array();
  if (message.at("type") == "followup_menu") {
    for (const auto& f : p.at("followups")) out.push_back(f);
  }
  if (p.contains("options")) {
    for (const auto& o : p.at("options")) out.push_back(o);
  }
  return out;
}

TEST(WsRoundTrip, MenuMirroringDriverCompletesASession) {
  xp::testing::TempDir dir("ws");
  ServerProcess server(dir.path(), "b");
  Connection conn(server.port());
  conn.send(envelope("start", {{"participant", "driver"}}));
  auto first = conn.receive();
  ASSERT_EQ(first.at("type"), "menu");
  const auto& info = first.at("payload").at("session");
  EXPECT_EQ(info.at("group"), "B");
  EXPECT_EQ(info.at("proto_version"), xp::session::kProtoVersion);

  xp::Rng rng(11);
  json options = options_of(first);
  json questionnaire;
  std::size_t turns = 0;
  while (questionnaire.is_null()) {
    ASSERT_FALSE(options.empty()) << "server offered nothing to send";
    ASSERT_LT(turns, 60u) << "driver did not reach the questionnaire";
    // Keep talking for 20 turns, then leave through the menu.
    std::vector<json> wanted;
    for (const auto& o : options) {
      const std::string type = o.at("send").at("type");
      const bool leaving = type == "questionnaire" || type == "end_explanation";
      if ((turns < 20) != leaving) wanted.push_back(o.at("send"));
    }
    if (wanted.empty()) {
      for (const auto& o : options) wanted.push_back(o.at("send"));
    }
    json pick = wanted[rng.below(wanted.size())];
    pick["proto_version"] = xp::session::kProtoVersion;
    conn.send(pick);
    ++turns;
    for (const auto& m : conn.receive_until({"menu", "followup_menu", "questionnaire", "protocol_error"})) {
      const std::string type = m.at("type");
      ASSERT_NE(type, "protocol_error") << m.dump() << " after " << pick.dump();
      if (type == "questionnaire") questionnaire = m.at("payload");
      if (type == "menu" || type == "followup_menu") options = options_of(m);
    }
  }
  EXPECT_GE(turns, 20u);

  json responses = json::object();
  for (const auto& item : questionnaire.at("items")) responses[item.at("id").get<std::string>()] = 4;
  conn.send(envelope("questionnaire", {{"responses", responses}}));
  conn.send(envelope("free_text", {{"text", "done"}}));
  EXPECT_EQ(conn.receive().at("type"), "bye");
  EXPECT_TRUE(conn.closed_by_server());

  const auto records = xp::session::load_records(dir.path());
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].participant_id, "driver");
  EXPECT_TRUE(records[0].questionnaire);
  EXPECT_EQ(records[0].free_text, "done");
  EXPECT_GT(records[0].events.size(), turns);
}

TEST(WsRoundTrip, ResumeNeedsTheToken) {
  xp::testing::TempDir dir("ws-resume");
  ServerProcess server(dir.path(), "a");
  std::string session_id;
  std::string token;
  {
    Connection conn(server.port());
    conn.send(envelope("start"));
    const auto first = conn.receive();
    session_id = first.at("payload").at("session").at("session_id");
    token = first.at("payload").at("session").at("token");
  }
  EXPECT_THROW(Connection(server.port(), "/?session=" + session_id + "&token=wrong"), beast::system_error);

  Connection resumed(server.port(), "/?session=" + session_id + "&token=" + token);
  resumed.send(envelope("choose_question", {{"question", "why_outcome"}}));
  const auto out = resumed.receive_until({"menu", "protocol_error"});
  EXPECT_EQ(out.front().at("type"), "explanation");
  EXPECT_EQ(out.back().at("type"), "menu");
}

TEST(WsRoundTrip, ErrorsComeBackAsProtocolErrors) {
  xp::testing::TempDir dir("ws-errors");
  ServerProcess server(dir.path(), "a");
  Connection conn(server.port());
  conn.send(envelope("end_explanation"));
  auto reply = conn.receive();
  EXPECT_EQ(reply.at("type"), "protocol_error");
  EXPECT_EQ(reply.at("payload").at("code"), "not_started");

  conn.send(envelope("start"));
  EXPECT_EQ(conn.receive().at("type"), "menu");
  conn.send(json{{"type", "dance"}});
  reply = conn.receive();
  EXPECT_EQ(reply.at("type"), "protocol_error");
  EXPECT_EQ(reply.at("payload").at("code"), "schema_error");

  conn.send(envelope("end_explanation"));
  reply = conn.receive();
  EXPECT_EQ(reply.at("type"), "protocol_error");
  EXPECT_FALSE(reply.at("payload").at("options").empty());
}

}  // namespace
