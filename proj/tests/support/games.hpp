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
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "scar/game/characteristic.hpp"

// Test-side games stored as full value tables indexed by bitmask, plus a
// Shapley reference computed the slow way: average marginals over all n!
// orderings.
namespace scar::testing {

using Table = std::vector<double>;

inline Table random_table(std::size_t n, std::mt19937_64& rng, double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Table t(std::size_t{1} << n);
  for (auto& x : t) x = u(rng);
  t[0] = 0.0;
  return t;
}

// Makes `player` a null player: v(S + i) = v(S) for all S.
inline void make_null(Table& t, std::size_t n, std::size_t player) {
  const std::size_t bit = std::size_t{1} << player;
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    if (m & bit) t[m] = t[m & ~bit];
  }
}

// Makes players a and b interchangeable: v(S + a) = v(S + b) for S without a, b.
inline void make_symmetric(Table& t, std::size_t n, std::size_t a, std::size_t b) {
  const std::size_t ba = std::size_t{1} << a, bb = std::size_t{1} << b;
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    if ((m & ba) && !(m & bb)) t[(m & ~ba) | bb] = t[m];
  }
}

inline std::uint64_t mask_of(const game::Coalition& c) {
  std::uint64_t m = 0;
  for (auto i : c.members()) m |= std::uint64_t{1} << i;
  return m;
}

inline game::CharacteristicOracle table_oracle(std::size_t n, const Table& t) {
  return game::CharacteristicOracle::from_function(
      n, [t](const game::Coalition& c) { return t[mask_of(c)]; });
}

inline std::vector<double> brute_force_shapley(std::size_t n, const Table& t) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    std::size_t m = 0;
    for (auto p : order) {
      const std::size_t next = m | (std::size_t{1} << p);
      phi[p] += t[next] - t[m];
      m = next;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& x : phi) x /= count;
  return phi;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace scar::testing
