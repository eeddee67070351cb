/*
 * Copyright 2026 The scar Authors.
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/coalition.hpp"

namespace scar::game {

// Binary hierarchy over players. Leaves hold player indices; every internal
// node has exactly two children. Nodes live in a flat arena addressed by index.
class PartitionTree {
 public:
  struct Node {
    // Player index for leaves, -1 for internal nodes.
    long player = -1;
    std::size_t left = 0;
    std::size_t right = 0;

    bool is_leaf() const noexcept { return player >= 0; }
  };

  PartitionTree() = default;

  static PartitionTree leaf(std::size_t player) {
    PartitionTree t;
    t.nodes_.push_back(Node{static_cast<long>(player), 0, 0});
    t.root_ = 0;
    return t;
  }

  static PartitionTree join(const PartitionTree& left, const PartitionTree& right) {
    require(!left.empty() && !right.empty(), ErrorKind::kStructure,
            "cannot join an empty hierarchy");
    PartitionTree t;
    t.nodes_.reserve(left.nodes_.size() + right.nodes_.size() + 1);
    const std::size_t l = t.graft(left, left.root_);
    const std::size_t r = t.graft(right, right.root_);
    t.nodes_.push_back(Node{-1, l, r});
    t.root_ = t.nodes_.size() - 1;
    return t;
  }

  // Balanced tree over consecutive players [lo, hi): split at the midpoint.
  static PartitionTree balanced(std::size_t lo, std::size_t hi) {
    require(hi > lo, ErrorKind::kStructure, "balanced tree over an empty range");
    if (hi - lo == 1) return leaf(lo);
    const std::size_t mid = lo + (hi - lo) / 2;
    return join(balanced(lo, mid), balanced(mid, hi));
  }

  // Build from raw nodes; validated against n_players.
  static PartitionTree from_nodes(std::vector<Node> nodes, std::size_t root,
                                  std::size_t n_players) {
    PartitionTree t;
    t.nodes_ = std::move(nodes);
    t.root_ = root;
    t.validate(n_players);
    return t;
  }

  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t root() const noexcept { return root_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  // Players under node `i`, in left-to-right order.
  std::vector<std::size_t> leaves(std::size_t i) const {
    std::vector<std::size_t> out;
    collect(i, out);
    return out;
  }
  std::vector<std::size_t> leaves() const {
    return empty() ? std::vector<std::size_t>{} : leaves(root_);
  }

  std::size_t depth() const { return empty() ? 0 : depth_of(root_); }

  // Throws kStructure unless the leaves are exactly 0..n_players-1 once each
  // and every internal node is binary over reachable children.
  void validate(std::size_t n_players) const {
    require(!nodes_.empty(), ErrorKind::kStructure, "hierarchy has no nodes");
    require(root_ < nodes_.size(), ErrorKind::kStructure, "hierarchy root out of range");
    std::vector<int> seen_player(n_players, 0);
    std::vector<int> seen_node(nodes_.size(), 0);
    std::vector<std::size_t> stack{root_};
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      require(i < nodes_.size(), ErrorKind::kStructure,
              "hierarchy child index " + std::to_string(i) + " out of range");
      require(seen_node[i]++ == 0, ErrorKind::kStructure,
              "hierarchy node " + std::to_string(i) + " reachable twice");
      const Node& n = nodes_[i];
      if (n.is_leaf()) {
        const auto p = static_cast<std::size_t>(n.player);
        require(p < n_players, ErrorKind::kStructure,
                "leaf player " + std::to_string(p) + " out of range");
        require(seen_player[p]++ == 0, ErrorKind::kStructure,
                "duplicated leaf for player " + std::to_string(p));
      } else {
        require(n.player == -1, ErrorKind::kStructure, "invalid node tag");
        stack.push_back(n.left);
        stack.push_back(n.right);
      }
    }
    for (std::size_t p = 0; p < n_players; ++p) {
      require(seen_player[p] == 1, ErrorKind::kStructure,
              "player " + std::to_string(p) + " missing from hierarchy");
    }
  }

  // Remaps leaf player indices through `map` (map[old] = new).
  PartitionTree relabel(const std::vector<std::size_t>& map) const {
    PartitionTree t = *this;
    for (auto& n : t.nodes_) {
      if (n.is_leaf()) n.player = static_cast<long>(map.at(static_cast<std::size_t>(n.player)));
    }
    return t;
  }

  // Nested-array rendering: leaf -> "3", internal -> "[l,r]".
  std::string to_string() const { return empty() ? "[]" : render(root_); }

  friend bool operator==(const PartitionTree& a, const PartitionTree& b) {
    if (a.empty() || b.empty()) return a.empty() == b.empty();
    return a.to_string() == b.to_string();
  }

 private:
  std::size_t graft(const PartitionTree& src, std::size_t i) {
    const Node& n = src.nodes_.at(i);
    if (n.is_leaf()) {
      nodes_.push_back(n);
      return nodes_.size() - 1;
    }
    const std::size_t l = graft(src, n.left);
    const std::size_t r = graft(src, n.right);
    nodes_.push_back(Node{-1, l, r});
    return nodes_.size() - 1;
  }

  void collect(std::size_t i, std::vector<std::size_t>& out) const {
    const Node& n = nodes_.at(i);
    if (n.is_leaf()) {
      out.push_back(static_cast<std::size_t>(n.player));
      return;
    }
    collect(n.left, out);
    collect(n.right, out);
  }

  std::size_t depth_of(std::size_t i) const {
    const Node& n = nodes_.at(i);
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_of(n.left), depth_of(n.right));
  }

  std::string render(std::size_t i) const {
    const Node& n = nodes_.at(i);
    if (n.is_leaf()) return std::to_string(n.player);
    return "[" + render(n.left) + "," + render(n.right) + "]";
  }

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

// Two-level coalition structure: disjoint, non-empty blocks covering all players.
class BlockPartition {
 public:
  BlockPartition() = default;

  BlockPartition(std::vector<std::vector<std::size_t>> blocks, std::size_t n_players)
      : blocks_(std::move(blocks)), n_players_(n_players) {
    std::vector<int> seen(n_players, 0);
    for (const auto& block : blocks_) {
      require(!block.empty(), ErrorKind::kPartition, "partition has an empty block");
      for (std::size_t p : block) {
        require(p < n_players, ErrorKind::kPartition,
                "partition member " + std::to_string(p) + " out of range");
        require(seen[p]++ == 0, ErrorKind::kPartition,
                "player " + std::to_string(p) + " appears in two blocks");
      }
    }
    for (std::size_t p = 0; p < n_players; ++p) {
      require(seen[p] == 1, ErrorKind::kPartition,
              "player " + std::to_string(p) + " is not covered by any block");
    }
  }

  static BlockPartition singletons(std::size_t n) {
    std::vector<std::vector<std::size_t>> b;
    for (std::size_t i = 0; i < n; ++i) b.push_back({i});
    return BlockPartition(std::move(b), n);
  }

  static BlockPartition single_block(std::size_t n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return BlockPartition({all}, n);
  }

  std::size_t n_players() const noexcept { return n_players_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }

  Coalition block_coalition(std::size_t k) const {
    return Coalition::of(n_players_, blocks_.at(k));
  }

 private:
  std::vector<std::vector<std::size_t>> blocks_;
  std::size_t n_players_ = 0;
};

}  // namespace scar::game
