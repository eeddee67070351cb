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

namespace scar::segmentation {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim_left(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

inline std::string_view trim(std::string_view s) {
  s = trim_left(s);
  std::size_t n = s.size();
  while (n > 0 && is_space(s[n - 1])) --n;
  return s.substr(0, n);
}

// Ordered token surfaces and their concatenation. A surface may carry its own
// leading whitespace (as byte-level BPE tokens do); offsets are byte offsets
// into the joined text.
class TokenSequence {
 public:
  TokenSequence() = default;

  // Surfaces are used verbatim; joined text is their plain concatenation.
  explicit TokenSequence(std::vector<std::string> surfaces) : surfaces_(std::move(surfaces)) {
    offsets_.clear();
    offsets_.reserve(surfaces_.size() + 1);
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
      require(!surfaces_[i].empty(), ErrorKind::kInvalidArgument,
              "token " + std::to_string(i) + " has an empty surface");
      offsets_.push_back(text_.size());
      text_ += surfaces_[i];
    }
    offsets_.push_back(text_.size());
  }

  // Word tokens: every token after the first that does not already start with
  // whitespace gets a single leading space.
  static TokenSequence from_words(const std::vector<std::string>& words) {
    std::vector<std::string> surfaces;
    surfaces.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0 && !words[i].empty() && !is_space(words[i].front())) {
        surfaces.push_back(" " + words[i]);
      } else {
        surfaces.push_back(words[i]);
      }
    }
    return TokenSequence(std::move(surfaces));
  }

  std::size_t size() const noexcept { return surfaces_.size(); }
  bool empty() const noexcept { return surfaces_.empty(); }
  const std::string& text() const noexcept { return text_; }
  const std::vector<std::string>& surfaces() const noexcept { return surfaces_; }
  const std::string& surface(std::size_t i) const { return surfaces_.at(i); }

  // Surface without leading/trailing whitespace.
  std::string_view content(std::size_t i) const { return trim(surfaces_.at(i)); }

  // Byte offset of token i; offset(size()) is text().size().
  std::size_t offset(std::size_t i) const { return offsets_.at(i); }

 private:
  std::vector<std::string> surfaces_;
  std::vector<std::size_t> offsets_{0};
  std::string text_;
};

}  // namespace scar::segmentation
