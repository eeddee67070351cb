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

#include <span>
#include <unordered_set>
#include <vector>

#include "scar/game/characteristic.hpp"

namespace scar::game {

// Forwards to an oracle while recording which distinct coalitions one solver
// call asked for. The size of that set is the solver's evals_used.
class QuerySet {
 public:
  explicit QuerySet(const CharacteristicOracle& oracle) : oracle_(oracle) {}

  std::vector<double> evaluate(std::span<const Coalition> coalitions) {
    for (const auto& c : coalitions) seen_.insert(c);
    return oracle_.evaluate_batch(coalitions);
  }

  double evaluate(const Coalition& c) {
    seen_.insert(c);
    return oracle_.evaluate(c);
  }

  std::size_t distinct() const noexcept { return seen_.size(); }
  const CharacteristicOracle& oracle() const noexcept { return oracle_; }

 private:
  const CharacteristicOracle& oracle_;
  std::unordered_set<Coalition, CoalitionHash> seen_;
};

// w[s] = s! (n-s-1)! / n!, the Shapley weight of a coalition of size s that
// excludes the player, for s = 0..n-1.
inline std::vector<double> shapley_weights(std::size_t n) {
  std::vector<double> w(n, 0.0);
  if (n == 0) return w;
  w[0] = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s + 1 < n; ++s) {
    w[s + 1] = w[s] * static_cast<double>(s + 1) / static_cast<double>(n - s - 1);
  }
  return w;
}

}  // namespace scar::game
