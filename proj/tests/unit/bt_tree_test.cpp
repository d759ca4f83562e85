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

#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "xp/bt/tree.hpp"

namespace xp::bt {
namespace {

// Handlers that record calls and return scripted statuses.
struct Script {
  std::map<std::string, std::vector<BtStatus>> plan;
  std::vector<std::string> calls;
  Registry registry;

  void add(const std::string& name, std::vector<BtStatus> statuses) {
    plan[name] = std::move(statuses);
    registry.actions[name] = [this, name](ActionCall& c) {
      calls.push_back(name + (c.resumed ? "+" : ""));
      auto& todo = plan[name];
      BtStatus s = todo.front();
      if (todo.size() > 1) todo.erase(todo.begin());
      return s;
    };
  }
};

std::vector<std::unique_ptr<BtNode>> actions(std::initializer_list<const char*> names) {
  std::vector<std::unique_ptr<BtNode>> out;
  for (const char* n : names) out.push_back(BtNode::action(n, n));
  return out;
}

TEST(Blackboard, NamespacedKeysOnly) {
  Blackboard bb;
  bb.set("dialogue.x", 1);
  bb.set("eval.y", std::string("v"));
  EXPECT_EQ(bb.get<int>("dialogue.x"), 1);
  EXPECT_EQ(bb.find<double>("dialogue.x"), nullptr);
  EXPECT_THROW(bb.set("other.x", 1), Error);
  EXPECT_THROW(bb.get<int>("dialogue.missing"), Error);
  EXPECT_EQ(bb.keys(), (std::vector<std::string>{"dialogue.x", "eval.y"}));
  bb.erase("dialogue.x");
  EXPECT_FALSE(bb.has("dialogue.x"));
}

TEST(BtTick, SequenceResumesRunningChildWithoutReplayingEarlierOnes) {
  Script s;
  s.add("a", {BtStatus::kSuccess});
  s.add("b", {BtStatus::kRunning, BtStatus::kRunning, BtStatus::kSuccess});
  s.add("c", {BtStatus::kSuccess});
  auto root = BtNode::sequence("root", actions({"a", "b", "c"}));
  Ticker t(s.registry);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kRunning);
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kRunning);
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kSuccess);
  EXPECT_EQ(s.calls, (std::vector<std::string>{"a", "b", "b+", "b+", "c"}));
  // A finished sequence starts over from its first child.
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kSuccess);
  EXPECT_EQ(s.calls, (std::vector<std::string>{"a", "b", "b+", "b+", "c", "a", "b", "c"}));
}

TEST(BtTick, SequenceFailsOnFirstFailure) {
  Script s;
  s.add("a", {BtStatus::kFailure});
  s.add("b", {BtStatus::kSuccess});
  auto root = BtNode::sequence("root", actions({"a", "b"}));
  Ticker t(s.registry);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kFailure);
  EXPECT_EQ(s.calls, (std::vector<std::string>{"a"}));
}

TEST(BtTick, FallbackStopsAtFirstSuccessAndResumes) {
  Script s;
  s.add("a", {BtStatus::kFailure});
  s.add("b", {BtStatus::kRunning, BtStatus::kSuccess});
  s.add("c", {BtStatus::kSuccess});
  auto root = BtNode::fallback("root", actions({"a", "b", "c"}));
  Ticker t(s.registry);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kRunning);
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kSuccess);
  EXPECT_EQ(s.calls, (std::vector<std::string>{"a", "b", "b+"}));
}

TEST(BtTick, FallbackFailsWhenAllFail) {
  Script s;
  s.add("a", {BtStatus::kFailure});
  s.add("b", {BtStatus::kFailure});
  auto root = BtNode::fallback("root", actions({"a", "b"}));
  Ticker t(s.registry);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kFailure);
}

TEST(BtTick, RepeatLoopsUntilChildFails) {
  Script s;
  s.add("a", {BtStatus::kSuccess, BtStatus::kSuccess, BtStatus::kRunning, BtStatus::kFailure});
  auto root = BtNode::repeat("loop", BtNode::action("a", "a"));
  Ticker t(s.registry);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kRunning);
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kSuccess);
  EXPECT_EQ(s.calls, (std::vector<std::string>{"a", "a", "a", "a+"}));
}

TEST(BtTick, RepeatIsBounded) {
  Script s;
  s.add("a", {BtStatus::kSuccess});
  auto root = BtNode::repeat("loop", BtNode::action("a", "a"));
  Ticker t(s.registry);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kFailure);
  EXPECT_EQ(s.calls.size(), Ticker::kMaxRepeat);
  ASSERT_TRUE(t.last_error());
}

TEST(BtTick, GuardChecksConditionWithArgument) {
  Script s;
  s.add("a", {BtStatus::kSuccess});
  std::string seen;
  s.registry.conditions["flag"] = [&](const Blackboard& bb, std::string_view arg) {
    seen = std::string(arg);
    return bb.has("dialogue.flag");
  };
  auto root = BtNode::guard("g", "flag:on", BtNode::action("a", "a"));
  check_tree(*root, s.registry);
  Ticker t(s.registry);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kFailure);
  EXPECT_EQ(seen, "on");
  EXPECT_TRUE(s.calls.empty());
  bb.set("dialogue.flag", true);
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kSuccess);
}

TEST(BtTick, HandlerExceptionBecomesFailure) {
  Registry r;
  r.actions["boom"] = [](ActionCall&) -> BtStatus { throw std::runtime_error("kaput"); };
  auto root = BtNode::action("boom", "boom");
  Ticker t(r);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kFailure);
  ASSERT_TRUE(t.last_error());
  EXPECT_NE(t.last_error()->find("kaput"), std::string::npos);
}

TEST(BtTick, ActionReceivesArgument) {
  Registry r;
  std::string got;
  r.actions["say"] = [&](ActionCall& c) {
    got = std::string(c.argument);
    return BtStatus::kSuccess;
  };
  auto root = BtNode::action("say", "say:q:1");
  Ticker t(r);
  Blackboard bb;
  EXPECT_EQ(t.tick(*root, bb), BtStatus::kSuccess);
  EXPECT_EQ(got, "q:1");
}

TEST(BtCheck, RejectsUnknownKeysAndBadArity) {
  Registry r;
  r.actions["a"] = [](ActionCall&) { return BtStatus::kSuccess; };
  EXPECT_NO_THROW(check_tree(*BtNode::sequence("s", actions({"a"})), r));
  EXPECT_THROW(check_tree(*BtNode::action("x", "missing"), r), Error);
  EXPECT_THROW(check_tree(*BtNode::fallback("f", {}), r), Error);
  EXPECT_THROW(check_tree(*BtNode::guard("g", "nope", BtNode::action("a", "a")), r), Error);
}

TEST(BtTree, FindSizeResetAndJson) {
  auto root = BtNode::sequence("root", actions({"a", "b"}));
  EXPECT_EQ(root->size(), 3u);
  ASSERT_NE(root->find("b"), nullptr);
  EXPECT_EQ(root->find("zz"), nullptr);
  root->cursor = 1;
  root->running = true;
  reset(*root);
  EXPECT_EQ(root->cursor, 0u);
  EXPECT_FALSE(root->running);
  const auto j = tree_to_json(*root);
  EXPECT_EQ(j["kind"], "sequence");
  EXPECT_EQ(j["children"].size(), 2u);
  EXPECT_EQ(j["children"][0]["key"], "a");
}

}  // namespace
}  // namespace xp::bt
