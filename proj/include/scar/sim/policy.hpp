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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scar/error.hpp"
#include "scar/random.hpp"
#include "scar/shaping/shaping.hpp"
#include "scar/sim/env.hpp"

namespace scar::sim {

// kPositional: one logit row per timestep.
// kPreviousToken: one row per previous token, plus a start row.
enum class PolicyOrder { kPositional, kPreviousToken };

// Tabular softmax policy pi(a | s) at temperature 1.
class PolicyTable {
 public:
  PolicyTable(std::size_t horizon, std::size_t vocab_size,
              PolicyOrder order = PolicyOrder::kPositional)
      : horizon_(horizon), vocab_(vocab_size), order_(order) {
    require(vocab_size >= 1 && horizon >= 1, ErrorKind::kInvalidArgument,
            "policy table needs a positive horizon and vocabulary");
    const std::size_t rows = order == PolicyOrder::kPositional ? horizon : vocab_size + 1;
    logits_.assign(rows * vocab_size, 0.0);
  }

  static PolicyTable uniform(const Env& env, PolicyOrder order = PolicyOrder::kPositional) {
    return PolicyTable(env.horizon(), env.vocab_size(), order);
  }

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t vocab_size() const noexcept { return vocab_; }
  PolicyOrder order() const noexcept { return order_; }
  std::size_t rows() const noexcept { return logits_.size() / vocab_; }

  // Row used at 0-based step t after emitting `prev` (ignored at t = 0).
  std::size_t row_for(std::size_t t, std::size_t prev) const {
    if (order_ == PolicyOrder::kPositional) return t;
    return t == 0 ? 0 : prev + 1;
  }

  double& logit(std::size_t row, std::size_t a) { return logits_.at(row * vocab_ + a); }
  double logit(std::size_t row, std::size_t a) const { return logits_.at(row * vocab_ + a); }

  std::vector<double> probabilities(std::size_t row) const {
    std::vector<double> p(vocab_);
    const double* z = &logits_.at(row * vocab_);
    const double m = *std::max_element(z, z + vocab_);
    double s = 0.0;
    for (std::size_t a = 0; a < vocab_; ++a) {
      p[a] = std::exp(z[a] - m);
      s += p[a];
    }
    for (auto& x : p) x /= s;
    return p;
  }

  double log_prob(std::size_t row, std::size_t a) const {
    const double* z = &logits_.at(row * vocab_);
    const double m = *std::max_element(z, z + vocab_);
    double s = 0.0;
    for (std::size_t b = 0; b < vocab_; ++b) s += std::exp(z[b] - m);
    return z[a] - m - std::log(s);
  }

  bool compatible_with(const Env& env) const {
    return horizon_ == env.horizon() && vocab_ == env.vocab_size();
  }

 private:
  std::size_t horizon_;
  std::size_t vocab_;
  PolicyOrder order_;
  std::vector<double> logits_;
};

struct Rollout {
  std::vector<std::size_t> tokens;
  shaping::TrajectoryLogProbs logprobs;
  double terminal_reward = 0.0;
};

inline std::size_t sample_categorical(const std::vector<double>& p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < p.size(); ++a) {
    acc += p[a];
    if (u < acc) return a;
  }
  return p.size() - 1;
}

// One episode: tokens drawn from the policy, with log-probabilities under the
// policy and under the frozen reference.
inline Rollout rollout(const PolicyTable& policy, const PolicyTable& reference, const Env& env,
                       Rng& rng) {
  require(policy.compatible_with(env) && reference.compatible_with(env),
          ErrorKind::kInvalidArgument, "policy shape does not match the environment");
  Rollout r;
  r.tokens.reserve(env.horizon());
  std::size_t prev = 0;
  for (std::size_t t = 0; t < env.horizon(); ++t) {
    const std::size_t row = policy.row_for(t, prev);
    const auto p = policy.probabilities(row);
    const std::size_t a = sample_categorical(p, rng);
    r.tokens.push_back(a);
    r.logprobs.logp_policy.push_back(std::min(0.0, policy.log_prob(row, a)));
    r.logprobs.logp_ref.push_back(std::min(0.0, reference.log_prob(reference.row_for(t, prev), a)));
    prev = a;
  }
  r.terminal_reward = env.terminal_reward(r.tokens);
  return r;
}

inline Rollout rollout(const PolicyTable& policy, const PolicyTable& reference, const Env& env,
                       std::uint64_t seed) {
  Rng rng(seed);
  return rollout(policy, reference, env, rng);
}

}  // namespace scar::sim
