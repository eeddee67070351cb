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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/exact.hpp"
#include "scar/game/owen.hpp"
#include "scar/oracle/characteristic.hpp"
#include "scar/random.hpp"
#include "scar/segmentation/segment.hpp"
#include "scar/shaping/shaping.hpp"
#include "scar/sim/env.hpp"
#include "scar/sim/policy.hpp"

namespace scar::sim {

enum class Scheme { kSparse, kUniform, kEndConcentrated, kScarExact, kScarOwen };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kSparse: return "sparse";
    case Scheme::kUniform: return "uniform";
    case Scheme::kEndConcentrated: return "end_concentrated";
    case Scheme::kScarExact: return "scar_exact";
    case Scheme::kScarOwen: return "scar_owen";
  }
  return "unknown";
}

inline Scheme scheme_from_string(std::string_view s) {
  if (s == "sparse") return Scheme::kSparse;
  if (s == "uniform") return Scheme::kUniform;
  if (s == "end_concentrated") return Scheme::kEndConcentrated;
  if (s == "scar_exact") return Scheme::kScarExact;
  if (s == "scar_owen") return Scheme::kScarOwen;
  fail(ErrorKind::kInvalidArgument, "unknown scheme '" + std::string(s) + "'");
}

struct TrainConfig {
  Scheme scheme = Scheme::kSparse;
  double alpha = shaping::ShapingConfig::kDefaultAlpha;
  double beta = 0.05;
  double learning_rate = 0.1;
  std::size_t episodes = 2000;
  // Progress granularity for callers; does not affect training.
  std::size_t eval_every = 100;
  std::uint64_t seed = 1;
  segmentation::Granularity granularity = segmentation::Granularity::kToken;
  // end_concentrated only.
  double sharpness = 4.0;
  // Subtract a per-timestep running mean of the return before the update.
  bool baseline = true;
  double baseline_decay = 0.9;
  PolicyOrder order = PolicyOrder::kPositional;
  oracle::MaskingMode mask = oracle::MaskingMode::space_fill();

  void validate() const {
    require(learning_rate >= 0.0 && std::isfinite(learning_rate), ErrorKind::kInvalidArgument,
            "learning_rate must be a non-negative number");
    require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::kInvalidArgument, "alpha must lie in [0, 1]");
    require(beta >= 0.0 && std::isfinite(beta), ErrorKind::kInvalidArgument,
            "beta must be non-negative");
    require(sharpness > 0.0, ErrorKind::kInvalidArgument, "sharpness must be positive");
    require(baseline_decay >= 0.0 && baseline_decay < 1.0, ErrorKind::kInvalidArgument,
            "baseline_decay must lie in [0, 1)");
    require(granularity != segmentation::Granularity::kSpan, ErrorKind::kInvalidArgument,
            "span granularity needs parse trees, which generated text does not have");
  }
};

struct RunLog {
  std::string scheme;
  std::uint64_t seed = 0;
  double max_reward = 0.0;
  // One entry per episode.
  std::vector<double> terminal_reward;
  std::vector<double> moving_avg;
  std::vector<std::size_t> oracle_evals;
  // Sampled KL to the reference: sum_t log pi(y_t) - log pi_ref(y_t).
  std::vector<double> kl;
  // Largest |sum r_shap - r_terminal| over SCAR episodes.
  double max_conservation_residual = 0.0;
  // Largest return-equality residual over all episodes.
  double max_return_residual = 0.0;

  std::size_t episodes() const noexcept { return terminal_reward.size(); }
};

inline constexpr std::size_t kMovingAverageWindow = 50;

// Trailing mean over the last `window` entries (fewer at the start).
inline std::vector<double> moving_average(const std::vector<double>& xs,
                                          std::size_t window = kMovingAverageWindow) {
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= window) sum -= xs[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

// First 1-based episode whose moving average reaches fraction * max_reward.
inline std::optional<std::size_t> episodes_to_threshold(const RunLog& log, double fraction,
                                                        std::size_t window = kMovingAverageWindow) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorKind::kInvalidArgument,
          "fraction must lie in (0, 1]");
  const auto ma = log.moving_avg.size() == log.terminal_reward.size() &&
                          window == kMovingAverageWindow
                      ? log.moving_avg
                      : moving_average(log.terminal_reward, window);
  const double target = fraction * log.max_reward;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ma[i] >= target) return i + 1;
  }
  return std::nullopt;
}

struct EpisodeRewards {
  shaping::ShapedTrajectory shaped;
  std::size_t oracle_evals = 0;
};

// Per-timestep rewards for one rollout under a credit scheme.
class RewardAssigner {
 public:
  RewardAssigner(const Env& env, const TrainConfig& cfg) : env_(env), cfg_(cfg) {}

  EpisodeRewards assign(const Rollout& r) {
    const std::size_t T = r.tokens.size();
    const auto r_kl = shaping::kl_penalty(r.logprobs, cfg_.beta);
    EpisodeRewards out;
    switch (cfg_.scheme) {
      case Scheme::kSparse:
        out.shaped = shaping::combine(r_kl, std::vector<double>(T, 0.0), r.terminal_reward, 0.0);
        break;
      case Scheme::kUniform:
        out.shaped = shaping::combine(r_kl, shaping::uniform_rewards(r.terminal_reward, T),
                                      r.terminal_reward, cfg_.alpha);
        break;
      case Scheme::kEndConcentrated:
        out.shaped = shaping::combine(
            r_kl, shaping::end_concentrated_rewards(r.terminal_reward, T, cfg_.sharpness),
            r.terminal_reward, cfg_.alpha);
        break;
      case Scheme::kScarExact:
      case Scheme::kScarOwen: {
        const auto& placed = shapley_rewards(r, out.oracle_evals);
        out.shaped = shaping::combine(r_kl, placed, r.terminal_reward, cfg_.alpha);
        break;
      }
    }
    return out;
  }

 private:
  // Segment, build v from the environment's reward model, solve, place.
  // Attributions are cached per distinct token sequence within a run.
  const std::vector<double>& shapley_rewards(const Rollout& r, std::size_t& evals) {
    if (auto it = cache_.find(r.tokens); it != cache_.end()) {
      evals = 0;
      return it->second;
    }
    const auto seq = env_.sequence(r.tokens);
    const auto seg = cfg_.granularity == segmentation::Granularity::kSentence
                         ? segmentation::segment_sentences(seq)
                         : segmentation::segment_tokens(seq);
    oracle::CharacteristicOptions opt;
    opt.mode = cfg_.mask;
    auto v = oracle::characteristic_from_oracle(env_.reward_model(), env_.prompt(), seg, opt);
    const auto attribution = cfg_.scheme == Scheme::kScarExact
                                 ? game::exact_shapley(v)
                                 : game::owen_hierarchical(v, seg.hierarchy);
    evals = v.eval_count();
    auto placed = shaping::place_shap_rewards(attribution, segmentation::completion_timesteps(seg),
                                              r.tokens.size());
    return cache_.emplace(r.tokens, std::move(placed)).first->second;
  }

  const Env& env_;
  const TrainConfig& cfg_;
  std::map<std::vector<std::size_t>, std::vector<double>> cache_;
};

// REINFORCE with reward-to-go G_t = sum_{t' >= t} r_total[t'] on a tabular
// softmax policy. The reference policy is the initial policy, frozen.
inline RunLog train(PolicyTable& policy, const Env& env, const TrainConfig& cfg) {
  cfg.validate();
  require(policy.compatible_with(env), ErrorKind::kInvalidArgument,
          "policy shape does not match the environment");
  const PolicyTable reference = policy;
  const std::size_t T = env.horizon();

  RunLog log;
  log.scheme = std::string(to_string(cfg.scheme));
  log.seed = cfg.seed;
  log.max_reward = env.max_reward();
  log.terminal_reward.reserve(cfg.episodes);

  Rng rng(cfg.seed);
  RewardAssigner assigner(env, cfg);
  std::vector<double> baseline(T, 0.0);
  bool baseline_ready = false;
  std::vector<double> go(T);

  for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
    const Rollout r = rollout(policy, reference, env, rng);
    EpisodeRewards rewards;
    try {
      rewards = assigner.assign(r);
    } catch (const Error& e) {
      fail(e.kind(), "episode " + std::to_string(ep + 1) + ": " + e.what());
    }
    const auto& shaped = rewards.shaped;

    double shap_sum = 0.0;
    for (double x : shaped.r_shap) shap_sum += x;
    if (cfg.scheme == Scheme::kScarExact || cfg.scheme == Scheme::kScarOwen) {
      log.max_conservation_residual =
          std::max(log.max_conservation_residual, std::abs(shap_sum - r.terminal_reward));
    }
    log.max_return_residual =
        std::max(log.max_return_residual, shaping::verify_return_equality(shaped));

    double acc = 0.0;
    for (std::size_t t = T; t-- > 0;) {
      acc += shaped.r_total[t];
      go[t] = acc;
    }

    if (cfg.learning_rate > 0.0) {
      std::size_t prev = 0;
      for (std::size_t t = 0; t < T; ++t) {
        const double advantage = cfg.baseline && baseline_ready ? go[t] - baseline[t] : go[t];
        const std::size_t row = policy.row_for(t, prev);
        const auto p = policy.probabilities(row);
        const std::size_t a = r.tokens[t];
        for (std::size_t b = 0; b < p.size(); ++b) {
          const double grad = (b == a ? 1.0 : 0.0) - p[b];
          policy.logit(row, b) += cfg.learning_rate * advantage * grad;
        }
        prev = a;
      }
    }
    if (cfg.baseline) {
      for (std::size_t t = 0; t < T; ++t) {
        baseline[t] = baseline_ready
                          ? cfg.baseline_decay * baseline[t] + (1.0 - cfg.baseline_decay) * go[t]
                          : go[t];
      }
      baseline_ready = true;
    }

    double kl = 0.0;
    for (std::size_t t = 0; t < T; ++t) kl += r.logprobs.logp_policy[t] - r.logprobs.logp_ref[t];
    log.terminal_reward.push_back(r.terminal_reward);
    log.oracle_evals.push_back(rewards.oracle_evals);
    log.kl.push_back(kl);
  }
  log.moving_avg = moving_average(log.terminal_reward);
  return log;
}

}  // namespace scar::sim
