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

// A small behaviour-tree engine. Nodes keep their own resume position, so a
// tree instance belongs to exactly one conversation.
//
// Tick semantics:
//   Action    runs its handler; Running resumes the same handler next tick
//   Sequence  ticks children left to right; fails on the first failure
//   Fallback  ticks children left to right; succeeds on the first success
//   Repeat    re-ticks its child within the same tick until the child fails,
//             then succeeds
//   Guard     ticks its child only while the named condition holds
// A Running child is re-entered at the same index on the next tick.

#pragma once

#include <any>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xp/error.hpp"

namespace xp::bt {

enum class BtStatus { kSuccess, kFailure, kRunning };
std::string_view to_string(BtStatus status);

enum class NodeKind { kAction, kSequence, kFallback, kRepeat, kGuard };
std::string_view to_string(NodeKind kind);

// Key-value store shared by the handlers of one tree. Keys must start with
// one of the namespaces "dialogue.", "persona.", "target.", "eval.".
class Blackboard {
 public:
  static bool valid_key(std::string_view key);

  template <typename T>
  void set(std::string_view key, T value) {
    check(key);
    values_[std::string(key)] = std::move(value);
  }

  template <typename T>
  T* find(std::string_view key) {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : std::any_cast<T>(&it->second);
  }

  template <typename T>
  const T* find(std::string_view key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : std::any_cast<T>(&it->second);
  }

  // Throws kHandlerError when the key is missing or holds another type.
  template <typename T>
  T& get(std::string_view key) {
    T* v = find<T>(key);
    if (!v) throw Error(ErrorCode::kHandlerError, "blackboard has no value for '" + std::string(key) + "'");
    return *v;
  }

  template <typename T>
  const T& get(std::string_view key) const {
    const T* v = find<T>(key);
    if (!v) throw Error(ErrorCode::kHandlerError, "blackboard has no value for '" + std::string(key) + "'");
    return *v;
  }

  bool has(std::string_view key) const { return values_.find(key) != values_.end(); }
  void erase(std::string_view key);
  std::vector<std::string> keys() const;

 private:
  static void check(std::string_view key);
  std::map<std::string, std::any, std::less<>> values_;
};

struct BtNode {
  NodeKind kind = NodeKind::kAction;
  std::string name;
  // Action: handler id; Guard: condition key. Both have the form
  // "<registered name>[:<argument>]".
  std::string key;
  std::vector<std::unique_ptr<BtNode>> children;

  // Runtime state.
  std::size_t cursor = 0;
  bool running = false;

  static std::unique_ptr<BtNode> action(std::string name, std::string handler);
  static std::unique_ptr<BtNode> sequence(std::string name, std::vector<std::unique_ptr<BtNode>> children);
  static std::unique_ptr<BtNode> fallback(std::string name, std::vector<std::unique_ptr<BtNode>> children);
  static std::unique_ptr<BtNode> repeat(std::string name, std::unique_ptr<BtNode> child);
  static std::unique_ptr<BtNode> guard(std::string name, std::string condition, std::unique_ptr<BtNode> child);

  // Depth-first search by name.
  BtNode* find(std::string_view node_name);
  std::size_t size() const;
};

struct ActionCall {
  Blackboard& bb;
  std::string_view argument;
  bool resumed;  // false on the first tick of a new activation
};

using ActionHandler = std::function<BtStatus(ActionCall&)>;
using Condition = std::function<bool(const Blackboard&, std::string_view argument)>;

struct Registry {
  std::map<std::string, ActionHandler, std::less<>> actions;
  std::map<std::string, Condition, std::less<>> conditions;
};

// Checks composite arity and that every key resolves in the registry.
// Throws kInvalidGraph.
void check_tree(const BtNode& root, const Registry& registry);

class Ticker {
 public:
  static constexpr std::size_t kMaxRepeat = 10000;

  explicit Ticker(const Registry& registry) : registry_(registry) {}

  // Handler exceptions turn the action into Failure and are kept in
  // last_error().
  BtStatus tick(BtNode& node, Blackboard& bb);

  const std::optional<std::string>& last_error() const { return last_error_; }

 private:
  BtStatus tick_action(BtNode& node, Blackboard& bb);

  const Registry& registry_;
  std::optional<std::string> last_error_;
};

// Resets every node's resume position.
void reset(BtNode& node);

// Debug document: {"kind", "name", "key"?, "children"?}.
nlohmann::json tree_to_json(const BtNode& node);

}  // namespace xp::bt
