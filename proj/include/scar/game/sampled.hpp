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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/attribution.hpp"
#include "scar/game/characteristic.hpp"
#include "scar/game/query_set.hpp"
#include "scar/random.hpp"

namespace scar::game {

// Permutation-sampling estimator: each player's value is the mean of its
// marginal contribution over uniformly random arrival orders. Every sampled
// ordering telescopes to v(P) - v(empty), so the estimate is efficient for
// any sample size.
inline AttributionVector sampled_shapley(const CharacteristicOracle& oracle,
                                         std::size_t n_permutations, std::uint64_t seed) {
  require(n_permutations >= 1, ErrorKind::kPrecondition,
          "sampled_shapley needs n_permutations >= 1");
  const std::size_t n = oracle.n_players();

  Rng rng(seed);
  QuerySet queries(oracle);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Welford accumulators.
  std::vector<double> mean(n, 0.0);
  std::vector<double> m2(n, 0.0);
  std::vector<Coalition> prefixes(n + 1, Coalition::empty(n));

  for (std::size_t s = 0; s < n_permutations; ++s) {
    shuffle(order, rng);
    for (std::size_t k = 0; k < n; ++k) prefixes[k + 1] = prefixes[k].with(order[k]);
    const auto v = queries.evaluate(prefixes);
    const double count = static_cast<double>(s + 1);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t p = order[k];
      const double x = v[k + 1] - v[k];
      const double delta = x - mean[p];
      mean[p] += delta / count;
      m2[p] += delta * (x - mean[p]);
    }
  }

  std::vector<double> se(n, 0.0);
  if (n_permutations > 1) {
    const double m = static_cast<double>(n_permutations);
    for (std::size_t p = 0; p < n; ++p) se[p] = std::sqrt(m2[p] / (m - 1.0) / m);
  }

  AttributionVector out;
  out.values = std::move(mean);
  out.method = Method::kSampled;
  out.evals_used = queries.distinct();
  out.stderr_values = std::move(se);
  return out;
}

}  // namespace scar::game
