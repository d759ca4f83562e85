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

#include "xp/bt/tree.hpp"

#include <nlohmann/json.hpp>

namespace xp::bt {

namespace {

constexpr std::string_view kNamespaces[] = {"dialogue.", "persona.", "target.", "eval."};

std::pair<std::string_view, std::string_view> split_key(std::string_view key) {
  auto colon = key.find(':');
  if (colon == std::string_view::npos) return {key, {}};
  return {key.substr(0, colon), key.substr(colon + 1)};
}

std::unique_ptr<BtNode> make(NodeKind kind, std::string name, std::string key,
                             std::vector<std::unique_ptr<BtNode>> children) {
  auto n = std::make_unique<BtNode>();
  n->kind = kind;
  n->name = std::move(name);
  n->key = std::move(key);
  n->children = std::move(children);
  return n;
}

std::vector<std::unique_ptr<BtNode>> one(std::unique_ptr<BtNode> child) {
  std::vector<std::unique_ptr<BtNode>> v;
  v.push_back(std::move(child));
  return v;
}

}  // namespace

std::string_view to_string(BtStatus status) {
  switch (status) {
    case BtStatus::kSuccess: return "success";
    case BtStatus::kFailure: return "failure";
    case BtStatus::kRunning: return "running";
  }
  return "?";
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kAction: return "action";
    case NodeKind::kSequence: return "sequence";
    case NodeKind::kFallback: return "fallback";
    case NodeKind::kRepeat: return "repeat";
    case NodeKind::kGuard: return "guard";
  }
  return "?";
}

bool Blackboard::valid_key(std::string_view key) {
  for (auto ns : kNamespaces) {
    if (key.size() > ns.size() && key.substr(0, ns.size()) == ns) return true;
  }
  return false;
}

void Blackboard::check(std::string_view key) {
  if (!valid_key(key)) {
    throw Error(ErrorCode::kHandlerError, "blackboard key '" + std::string(key) + "' is not namespaced");
  }
}

void Blackboard::erase(std::string_view key) {
  auto it = values_.find(key);
  if (it != values_.end()) values_.erase(it);
}

std::vector<std::string> Blackboard::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

std::unique_ptr<BtNode> BtNode::action(std::string name, std::string handler) {
  return make(NodeKind::kAction, std::move(name), std::move(handler), {});
}

std::unique_ptr<BtNode> BtNode::sequence(std::string name, std::vector<std::unique_ptr<BtNode>> children) {
  return make(NodeKind::kSequence, std::move(name), {}, std::move(children));
}

std::unique_ptr<BtNode> BtNode::fallback(std::string name, std::vector<std::unique_ptr<BtNode>> children) {
  return make(NodeKind::kFallback, std::move(name), {}, std::move(children));
}

std::unique_ptr<BtNode> BtNode::repeat(std::string name, std::unique_ptr<BtNode> child) {
  return make(NodeKind::kRepeat, std::move(name), {}, one(std::move(child)));
}

std::unique_ptr<BtNode> BtNode::guard(std::string name, std::string condition, std::unique_ptr<BtNode> child) {
  return make(NodeKind::kGuard, std::move(name), std::move(condition), one(std::move(child)));
}

BtNode* BtNode::find(std::string_view node_name) {
  if (name == node_name) return this;
  for (auto& c : children) {
    if (BtNode* hit = c->find(node_name)) return hit;
  }
  return nullptr;
}

std::size_t BtNode::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c->size();
  return n;
}

void check_tree(const BtNode& node, const Registry& registry) {
  switch (node.kind) {
    case NodeKind::kAction:
      if (!node.children.empty()) throw Error(ErrorCode::kInvalidGraph, "action '" + node.name + "' has children");
      if (!registry.actions.contains(split_key(node.key).first)) {
        throw Error(ErrorCode::kInvalidGraph, "action '" + node.name + "' has unknown handler '" + node.key + "'");
      }
      return;
    case NodeKind::kSequence:
    case NodeKind::kFallback:
      if (node.children.empty()) {
        throw Error(ErrorCode::kInvalidGraph, "composite '" + node.name + "' has no children");
      }
      break;
    case NodeKind::kGuard:
      if (!registry.conditions.contains(split_key(node.key).first)) {
        throw Error(ErrorCode::kInvalidGraph, "guard '" + node.name + "' has unknown condition '" + node.key + "'");
      }
      [[fallthrough]];
    case NodeKind::kRepeat:
      if (node.children.size() != 1) {
        throw Error(ErrorCode::kInvalidGraph, "decorator '" + node.name + "' needs exactly one child");
      }
      break;
  }
  for (const auto& c : node.children) check_tree(*c, registry);
}

BtStatus Ticker::tick_action(BtNode& node, Blackboard& bb) {
  auto [name, arg] = split_key(node.key);
  auto it = registry_.actions.find(name);
  if (it == registry_.actions.end()) {
    last_error_ = "unknown handler '" + node.key + "'";
    return BtStatus::kFailure;
  }
  ActionCall call{bb, arg, node.running};
  BtStatus status;
  try {
    status = it->second(call);
  } catch (const std::exception& e) {
    last_error_ = node.name + ": " + e.what();
    status = BtStatus::kFailure;
  }
  node.running = status == BtStatus::kRunning;
  return status;
}

BtStatus Ticker::tick(BtNode& node, Blackboard& bb) {
  switch (node.kind) {
    case NodeKind::kAction:
      return tick_action(node, bb);

    case NodeKind::kSequence:
    case NodeKind::kFallback: {
      const bool is_sequence = node.kind == NodeKind::kSequence;
      const BtStatus stop = is_sequence ? BtStatus::kFailure : BtStatus::kSuccess;
      std::size_t i = node.running ? node.cursor : 0;
      for (; i < node.children.size(); ++i) {
        BtStatus s = tick(*node.children[i], bb);
        if (s == BtStatus::kRunning) {
          node.cursor = i;
          node.running = true;
          return s;
        }
        if (s == stop) {
          node.cursor = 0;
          node.running = false;
          return s;
        }
      }
      node.cursor = 0;
      node.running = false;
      return is_sequence ? BtStatus::kSuccess : BtStatus::kFailure;
    }

    case NodeKind::kRepeat: {
      for (std::size_t n = 0; n < kMaxRepeat; ++n) {
        BtStatus s = tick(*node.children.front(), bb);
        if (s == BtStatus::kRunning) {
          node.running = true;
          return s;
        }
        if (s == BtStatus::kFailure) {
          node.running = false;
          return BtStatus::kSuccess;
        }
      }
      node.running = false;
      last_error_ = "repeat '" + node.name + "' exceeded its iteration cap";
      return BtStatus::kFailure;
    }

    case NodeKind::kGuard: {
      if (!node.running) {
        auto [name, arg] = split_key(node.key);
        auto it = registry_.conditions.find(name);
        if (it == registry_.conditions.end() || !it->second(bb, arg)) return BtStatus::kFailure;
      }
      BtStatus s = tick(*node.children.front(), bb);
      node.running = s == BtStatus::kRunning;
      return s;
    }
  }
  return BtStatus::kFailure;
}

void reset(BtNode& node) {
  node.cursor = 0;
  node.running = false;
  for (auto& c : node.children) reset(*c);
}

nlohmann::json tree_to_json(const BtNode& node) {
  nlohmann::json j = {{"kind", std::string(to_string(node.kind))}, {"name", node.name}};
  if (!node.key.empty()) j["key"] = node.key;
  if (!node.children.empty()) {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : node.children) children.push_back(tree_to_json(*c));
    j["children"] = std::move(children);
  }
  return j;
}

}  // namespace xp::bt
