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
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

#include "scar/game/coalition.hpp"

namespace scar::oracle {

// Bounded least-recently-used store of coalition values shared across
// requests. Entries are scoped by a context string naming the scorer, prompt,
// units and masking mode, so a hit always returns the value the same
// deterministic scorer would have produced.
class ValueCache {
 public:
  explicit ValueCache(std::size_t capacity = 1'000'000) : capacity_(capacity) {}

  std::optional<double> get(const std::shared_ptr<const std::string>& context,
                            const game::Coalition& c) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = index_.find(Key{context, c});
    if (it == index_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  void put(const std::shared_ptr<const std::string>& context, const game::Coalition& c,
           double value) {
    if (capacity_ == 0) return;
    std::lock_guard<std::mutex> lock(mu_);
    Key key{context, c};
    if (auto it = index_.find(key); it != index_.end()) {
      it->second->second = value;
      order_.splice(order_.begin(), order_, it->second);
      return;
    }
    order_.emplace_front(key, value);
    index_.emplace(std::move(key), order_.begin());
    while (index_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return index_.size();
  }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  struct Key {
    std::shared_ptr<const std::string> context;
    game::Coalition coalition;

    friend bool operator==(const Key& a, const Key& b) {
      return a.coalition == b.coalition &&
             (a.context == b.context || *a.context == *b.context);
    }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::string>{}(*k.context) * 31 + game::CoalitionHash{}(k.coalition);
    }
  };

  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::pair<Key, double>> order_;
  std::unordered_map<Key, std::list<std::pair<Key, double>>::iterator, KeyHash> index_;
};

}  // namespace scar::oracle
