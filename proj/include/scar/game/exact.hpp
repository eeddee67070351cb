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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/attribution.hpp"
#include "scar/game/characteristic.hpp"
#include "scar/game/query_set.hpp"

namespace scar::game {

struct ExactOptions {
  // 2^20 coalitions is about a million oracle calls.
  std::size_t max_players = 20;
  // Coalitions requested from the oracle per evaluate_batch call.
  std::size_t chunk = 4096;
};

// Shapley values by full enumeration of the 2^N coalitions.
//
// Coalitions are visited in Gray-code order so consecutive requests differ by
// one member; the value table is then swept once per player.
inline AttributionVector exact_shapley(const CharacteristicOracle& oracle,
                                       const ExactOptions& options = {}) {
  const std::size_t n = oracle.n_players();
  require(n >= 1, ErrorKind::kPrecondition, "exact_shapley needs at least one player");
  require(n <= options.max_players && n < 63, ErrorKind::kCapacity,
          "exact_shapley is capped at " + std::to_string(options.max_players) +
              " players (got " + std::to_string(n) + "); use sampled or owen");

  const std::uint64_t total = std::uint64_t{1} << n;
  std::vector<double> table(total, 0.0);
  QuerySet queries(oracle);

  const std::size_t chunk = options.chunk == 0 ? 4096 : options.chunk;
  std::vector<Coalition> batch;
  std::vector<std::uint64_t> masks;
  batch.reserve(chunk);
  masks.reserve(chunk);

  Coalition current = Coalition::empty(n);
  auto flush = [&] {
    const auto values = queries.evaluate(batch);
    for (std::size_t j = 0; j < values.size(); ++j) table[masks[j]] = values[j];
    batch.clear();
    masks.clear();
  };
  for (std::uint64_t k = 0; k < total; ++k) {
    if (k > 0) current.flip(static_cast<std::size_t>(std::countr_zero(k)));
    batch.push_back(current);
    masks.push_back(k ^ (k >> 1));
    if (batch.size() == chunk) flush();
  }
  if (!batch.empty()) flush();

  const auto weight = shapley_weights(n);
  std::vector<double> values(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      if (mask & bit) continue;
      const double marginal = table[mask | bit] - table[mask];
      if (marginal != 0.0) acc += weight[static_cast<std::size_t>(std::popcount(mask))] * marginal;
    }
    values[i] = acc;
  }

  AttributionVector out;
  out.values = std::move(values);
  out.method = Method::kExact;
  out.evals_used = queries.distinct();
  return out;
}

}  // namespace scar::game
