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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "scar/error.hpp"
#include "scar/segmentation/token_sequence.hpp"

namespace scar::segmentation {

// Parenthesized constituency tree, Penn style: "(S (NP the cat) (VP sat))".
// The first atom after "(" is the node label; a node opened directly by a
// nested "(" has no label. Leaves are verbatim token surfaces.
struct ParseNode {
  std::string label;
  // Set for leaves only.
  std::string word;
  std::vector<ParseNode> children;
  std::size_t leaf_count = 0;

  bool is_leaf() const noexcept { return children.empty(); }
};

namespace detail {

class TreeReader {
 public:
  explicit TreeReader(std::string_view text) : text_(text) {}

  ParseNode read() {
    skip_space();
    if (pos_ >= text_.size()) error("empty tree");
    ParseNode root;
    if (text_[pos_] == '(') {
      root = read_node();
    } else if (text_[pos_] == ')') {
      error("unexpected ')'");
    } else {
      root.word = read_atom();
      root.leaf_count = 1;
    }
    skip_space();
    if (pos_ < text_.size()) error("trailing content after tree");
    return root;
  }

 private:
  ParseNode read_node() {
    const std::size_t open = pos_;
    ++pos_;  // '('
    ParseNode node;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') {
      node.label = read_atom();
    }
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        error_at(open, "unbalanced parentheses: '(' is never closed");
      }
      const char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        node.children.push_back(read_node());
      } else {
        ParseNode leaf;
        leaf.word = read_atom();
        leaf.leaf_count = 1;
        node.children.push_back(std::move(leaf));
      }
    }
    if (node.children.empty()) error_at(open, "empty constituent");
    for (const auto& child : node.children) node.leaf_count += child.leaf_count;
    return node;
  }

  std::string read_atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  [[noreturn]] void error(const std::string& what) const { error_at(pos_, what); }
  [[noreturn]] void error_at(std::size_t offset, const std::string& what) const {
    fail(ErrorKind::kParse, what + " at character offset " + std::to_string(offset));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void collect_leaves(const ParseNode& node, std::vector<std::string>& out) {
  if (node.is_leaf()) {
    out.push_back(node.word);
    return;
  }
  for (const auto& c : node.children) collect_leaves(c, out);
}

}  // namespace detail

// Throws kParse with the character offset of the offending position.
inline ParseNode parse_bracketed(std::string_view text) {
  return detail::TreeReader(text).read();
}

inline std::vector<std::string> tree_leaves(const ParseNode& root) {
  std::vector<std::string> out;
  detail::collect_leaves(root, out);
  return out;
}

}  // namespace scar::segmentation
