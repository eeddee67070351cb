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

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scar/error.hpp"

namespace scar::game {

// Upper bound on players in any coalition. Exact enumeration is capped far
// lower (see ExactOptions); this only bounds the bit vector width.
inline constexpr std::size_t kMaxPlayers = 256;

// A subset of players 0..n_players-1, stored as a fixed-width bit vector.
class Coalition {
 public:
  using Bits = std::bitset<kMaxPlayers>;

  Coalition() = default;
  explicit Coalition(std::size_t n_players) : n_players_(n_players) {
    require(n_players <= kMaxPlayers, ErrorKind::kCapacity,
            "coalition width " + std::to_string(n_players) + " exceeds " +
                std::to_string(kMaxPlayers) + " players");
  }

  static Coalition empty(std::size_t n_players) { return Coalition(n_players); }

  static Coalition grand(std::size_t n_players) {
    Coalition c(n_players);
    for (std::size_t i = 0; i < n_players; ++i) c.bits_.set(i);
    return c;
  }

  // Low 64 players taken from `mask`; bits at or above n_players must be 0.
  static Coalition from_mask(std::size_t n_players, std::uint64_t mask) {
    Coalition c(n_players);
    for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
      if (mask & 1u) c.insert(i);
    }
    return c;
  }

  static Coalition of(std::size_t n_players, const std::vector<std::size_t>& members) {
    Coalition c(n_players);
    for (std::size_t i : members) c.insert(i);
    return c;
  }

  std::size_t n_players() const noexcept { return n_players_; }
  std::size_t size() const noexcept { return bits_.count(); }
  bool is_empty() const noexcept { return bits_.none(); }
  bool is_grand() const noexcept { return size() == n_players_; }
  const Bits& bits() const noexcept { return bits_; }

  bool contains(std::size_t i) const {
    check_index(i);
    return bits_.test(i);
  }

  Coalition& insert(std::size_t i) {
    check_index(i);
    bits_.set(i);
    return *this;
  }

  Coalition& erase(std::size_t i) {
    check_index(i);
    bits_.reset(i);
    return *this;
  }

  Coalition& flip(std::size_t i) {
    check_index(i);
    bits_.flip(i);
    return *this;
  }

  Coalition with(std::size_t i) const { return Coalition(*this).insert(i); }
  Coalition without(std::size_t i) const { return Coalition(*this).erase(i); }

  Coalition& operator|=(const Coalition& other) {
    check_width(other);
    bits_ |= other.bits_;
    return *this;
  }
  friend Coalition operator|(Coalition a, const Coalition& b) { return a |= b; }

  Coalition& operator&=(const Coalition& other) {
    check_width(other);
    bits_ &= other.bits_;
    return *this;
  }
  friend Coalition operator&(Coalition a, const Coalition& b) { return a &= b; }

  Coalition complement() const {
    Coalition c = grand(n_players_);
    c.bits_ &= ~bits_;
    return c;
  }

  bool intersects(const Coalition& other) const {
    check_width(other);
    return (bits_ & other.bits_).any();
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::size_t i = 0; i < n_players_; ++i) {
      if (bits_.test(i)) out.push_back(i);
    }
    return out;
  }

  // "{0,2,5}"
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (std::size_t i : members()) {
      if (!first) s += ',';
      s += std::to_string(i);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const Coalition& a, const Coalition& b) noexcept {
    return a.n_players_ == b.n_players_ && a.bits_ == b.bits_;
  }

 private:
  void check_index(std::size_t i) const {
    require(i < n_players_, ErrorKind::kInvalidArgument,
            "player index " + std::to_string(i) + " out of range for " +
                std::to_string(n_players_) + " players");
  }
  void check_width(const Coalition& other) const {
    require(other.n_players_ == n_players_, ErrorKind::kInvalidArgument,
            "coalition width mismatch: " + std::to_string(n_players_) + " vs " +
                std::to_string(other.n_players_));
  }

  std::size_t n_players_ = 0;
  Bits bits_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const noexcept {
    return std::hash<Coalition::Bits>{}(c.bits()) ^ (c.n_players() * 0x9e3779b97f4a7c15ULL);
  }
};

}  // namespace scar::game
