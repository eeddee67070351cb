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
#include <utility>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/attribution.hpp"
#include "scar/game/characteristic.hpp"
#include "scar/game/partition.hpp"
#include "scar/game/query_set.hpp"

namespace scar::game {

struct OwenOptions {
  // Two-level: cap on both the number of blocks and the largest block.
  std::size_t max_players = 20;
  // Hierarchical: a node at depth d carries 2^d outside contexts.
  std::size_t max_depth = 20;
};

// Owen value for a two-level coalition structure. Other blocks enter the
// player's coalitions only whole; inside its own block all subsets are used.
inline AttributionVector owen_two_level(const CharacteristicOracle& oracle,
                                        const BlockPartition& blocks,
                                        const OwenOptions& options = {}) {
  const std::size_t n = oracle.n_players();
  require(blocks.n_players() == n, ErrorKind::kPartition,
          "partition covers " + std::to_string(blocks.n_players()) + " players, oracle has " +
              std::to_string(n));
  const std::size_t m = blocks.size();
  require(m >= 1, ErrorKind::kPartition, "partition has no blocks");
  require(m <= options.max_players, ErrorKind::kCapacity,
          "owen_two_level is capped at " + std::to_string(options.max_players) + " blocks");
  for (const auto& b : blocks.blocks()) {
    require(b.size() <= options.max_players, ErrorKind::kCapacity,
            "owen_two_level is capped at " + std::to_string(options.max_players) +
                " players per block");
  }

  std::vector<Coalition> block_sets;
  for (std::size_t k = 0; k < m; ++k) block_sets.push_back(blocks.block_coalition(k));

  const auto outer_w = shapley_weights(m);
  QuerySet queries(oracle);
  std::vector<double> values(n, 0.0);

  for (std::size_t k = 0; k < m; ++k) {
    const auto& members = blocks.blocks()[k];
    const std::size_t b = members.size();
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < m; ++j) {
      if (j != k) others.push_back(j);
    }
    const std::uint64_t n_outer = std::uint64_t{1} << others.size();
    const std::uint64_t n_inner = std::uint64_t{1} << b;

    // table[r * n_inner + t] = v(Q_r ∪ T_t)
    std::vector<Coalition> requests;
    requests.reserve(n_outer * n_inner);
    for (std::uint64_t r = 0; r < n_outer; ++r) {
      Coalition q = Coalition::empty(n);
      for (std::size_t j = 0; j < others.size(); ++j) {
        if (r >> j & 1u) q |= block_sets[others[j]];
      }
      for (std::uint64_t t = 0; t < n_inner; ++t) {
        Coalition c = q;
        for (std::size_t j = 0; j < b; ++j) {
          if (t >> j & 1u) c.insert(members[j]);
        }
        requests.push_back(std::move(c));
      }
    }
    const auto table = queries.evaluate(requests);
    const auto inner_w = shapley_weights(b);

    for (std::size_t pos = 0; pos < b; ++pos) {
      const std::uint64_t bit = std::uint64_t{1} << pos;
      double acc = 0.0;
      for (std::uint64_t r = 0; r < n_outer; ++r) {
        const double wr = outer_w[static_cast<std::size_t>(std::popcount(r))];
        double inner = 0.0;
        for (std::uint64_t t = 0; t < n_inner; ++t) {
          if (t & bit) continue;
          const double marginal = table[r * n_inner + (t | bit)] - table[r * n_inner + t];
          inner += inner_w[static_cast<std::size_t>(std::popcount(t))] * marginal;
        }
        acc += wr * inner;
      }
      values[members[pos]] = acc;
    }
  }

  AttributionVector out;
  out.values = std::move(values);
  out.method = Method::kOwenTwoLevel;
  out.evals_used = queries.distinct();
  return out;
}

// Hierarchical Owen value over a binary hierarchy.
//
// An internal node with children L and R, seen from an outside context C,
// splits its credit as in a two-player game:
//   phi_L(C) = 1/2 [v(C∪L) - v(C)] + 1/2 [v(C∪L∪R) - v(C∪R)]
// Each child then inherits the parent's contexts twice, once without and once
// with its sibling, at half the weight. Children's credits sum to the
// parent's, so leaves sum to v(P) - v(empty). A balanced tree over N leaves
// needs O(N^2) distinct coalitions.
inline AttributionVector owen_hierarchical(const CharacteristicOracle& oracle,
                                           const PartitionTree& tree,
                                           const OwenOptions& options = {}) {
  const std::size_t n = oracle.n_players();
  tree.validate(n);
  require(tree.depth() <= options.max_depth, ErrorKind::kCapacity,
          "hierarchy depth " + std::to_string(tree.depth()) + " exceeds cap " +
              std::to_string(options.max_depth));

  struct Context {
    Coalition outside;
    double weight;
  };

  QuerySet queries(oracle);
  std::vector<double> values(n, 0.0);

  // Players under each node, as coalitions.
  std::vector<Coalition> under(tree.nodes().size(), Coalition::empty(n));
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    under[i] = Coalition::of(n, tree.leaves(i));
  }

  if (tree.node(tree.root()).is_leaf()) {
    const Coalition grand = Coalition::grand(n);
    const Coalition none = Coalition::empty(n);
    const auto v = queries.evaluate(std::vector<Coalition>{grand, none});
    values[static_cast<std::size_t>(tree.node(tree.root()).player)] = v[0] - v[1];
  } else {
    std::vector<std::pair<std::size_t, std::vector<Context>>> work;
    work.push_back({tree.root(), {Context{Coalition::empty(n), 1.0}}});
    while (!work.empty()) {
      auto [id, contexts] = std::move(work.back());
      work.pop_back();
      const auto& node = tree.node(id);
      const Coalition& left = under[node.left];
      const Coalition& right = under[node.right];

      std::vector<Coalition> requests;
      requests.reserve(4 * contexts.size());
      for (const auto& ctx : contexts) {
        requests.push_back(ctx.outside);
        requests.push_back(ctx.outside | left);
        requests.push_back(ctx.outside | right);
        requests.push_back(ctx.outside | left | right);
      }
      const auto v = queries.evaluate(requests);

      double phi_left = 0.0;
      double phi_right = 0.0;
      for (std::size_t c = 0; c < contexts.size(); ++c) {
        const double base = v[4 * c], with_l = v[4 * c + 1], with_r = v[4 * c + 2],
                     both = v[4 * c + 3];
        phi_left += contexts[c].weight * 0.5 * ((with_l - base) + (both - with_r));
        phi_right += contexts[c].weight * 0.5 * ((with_r - base) + (both - with_l));
      }

      auto descend = [&](std::size_t child, const Coalition& sibling, double phi) {
        const auto& cn = tree.node(child);
        if (cn.is_leaf()) {
          values[static_cast<std::size_t>(cn.player)] = phi;
          return;
        }
        std::vector<Context> next;
        next.reserve(2 * contexts.size());
        for (const auto& ctx : contexts) {
          next.push_back(Context{ctx.outside, ctx.weight * 0.5});
          next.push_back(Context{ctx.outside | sibling, ctx.weight * 0.5});
        }
        work.push_back({child, std::move(next)});
      };
      descend(node.right, left, phi_right);
      descend(node.left, right, phi_left);
    }
  }

  AttributionVector out;
  out.values = std::move(values);
  out.method = Method::kOwenHierarchical;
  out.evals_used = queries.distinct();
  return out;
}

}  // namespace scar::game
