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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "scar/error.hpp"
#include "scar/sim/bench.hpp"

namespace {

using scar::Error;
using namespace scar::sim;

EnvSpec spec_of(std::vector<VocabEntry> vocab, std::size_t T,
                scar::oracle::LexiconRM::Bigrams bonus = {}) {
  EnvSpec s;
  s.vocab = std::move(vocab);
  s.horizon = T;
  s.bigram_bonus = std::move(bonus);
  return s;
}

// Max over every vocab^T sequence, scored through the reward model.
double brute_force_max(const Env& env) {
  const std::size_t v = env.vocab_size(), T = env.horizon();
  std::vector<std::size_t> seq(T, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    best = std::max(best, env.terminal_reward(seq));
    std::size_t k = 0;
    while (k < T && ++seq[k] == v) seq[k++] = 0;
    if (k == T) break;
  }
  return best;
}

TEST(Env, MaxRewardExamples) {
  EXPECT_EQ(make_env(spec_of({{"good", 1}, {"bad", -1}}, 4)).max_reward(), 4.0);
  EXPECT_EQ(make_env(spec_of({{"good", 1}, {"bad", -1}}, 2, {{{"good", "good"}, 1.0}})).max_reward(), 3.0);
  EXPECT_THROW(make_env(spec_of({}, 4)), Error);
  EXPECT_THROW(make_env(spec_of({{"a", 1}, {"a", 2}}, 4)), Error);
  EXPECT_THROW(make_env(spec_of({{"a", 1}, {"b", 2}}, 1)), Error);
}

TEST(Env, ViterbiMatchesEnumeration) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2, 2);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<VocabEntry> vocab;
    const std::size_t v = 2 + rep % 3;
    for (std::size_t i = 0; i < v; ++i) vocab.push_back({names[i], u(rng)});
    scar::oracle::LexiconRM::Bigrams bonus;
    for (int k = 0; k < 3; ++k) bonus[{names[rng() % v], names[rng() % v]}] = u(rng);
    const auto env = make_env(spec_of(vocab, 2 + rep % 4, bonus));
    EXPECT_NEAR(env.max_reward(), brute_force_max(env), 1e-12);
  }
}

TEST(Env, FixtureFormat) {
  const auto j = nlohmann::json::parse(
      R"({"weights":{"good":1,"bad":-1},"bigrams":[["good","good",0.5]],"horizon":3,"prompt":"Say:"})");
  const auto spec = EnvSpec::from_json(j);
  EXPECT_EQ(spec.horizon, 3u);
  EXPECT_EQ(spec.prompt, "Say:");
  EXPECT_EQ(make_env(spec).max_reward(), 4.0);
  EXPECT_EQ(EnvSpec::from_json(spec.to_json()).to_json(), spec.to_json());
  EXPECT_THROW(EnvSpec::from_json(nlohmann::json::parse(R"({"weights":{"a":1,"b":2}})")), Error);
}

TEST(Rollout, DeterministicPolicyAndSeeds) {
  const auto env = make_env(spec_of({{"good", 1}, {"bad", -1}, {"meh", 0}}, 5));
  auto policy = PolicyTable::uniform(env);
  for (std::size_t t = 0; t < 5; ++t) policy.logit(t, t % 3) = 60.0;
  const auto ref = PolicyTable::uniform(env);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(rollout(policy, ref, env, seed).tokens, (std::vector<std::size_t>{0, 1, 2, 0, 1}));
  }
  const auto a = rollout(ref, ref, env, std::uint64_t{42});
  const auto b = rollout(ref, ref, env, std::uint64_t{42});
  EXPECT_EQ(a.tokens, b.tokens);
  EXPECT_EQ(a.logprobs.logp_policy, b.logprobs.logp_policy);
  EXPECT_EQ(a.terminal_reward, env.terminal_reward(a.tokens));
}

TEST(Rollout, UniformTwoTokenFrequency) {
  const auto env = make_env(spec_of({{"x", 0}, {"y", 0}}, 2));
  const auto pol = PolicyTable::uniform(env);
  scar::Rng rng(3);
  double ones = 0.0;
  const int n = 10000;
  for (int i = 0; i < n / 2; ++i) {
    for (auto a : rollout(pol, pol, env, rng).tokens) ones += double(a);
  }
  EXPECT_LE(std::abs(ones / n - 0.5), 3.0 * std::sqrt(0.25 / n));
}

TEST(Rollout, PreviousTokenOrderUsesStartRow) {
  const auto env = make_env(spec_of({{"x", 0}, {"y", 0}}, 3));
  PolicyTable pol(3, 2, PolicyOrder::kPreviousToken);
  EXPECT_EQ(pol.rows(), 3u);
  pol.logit(0, 1) = 60;  // start -> y
  pol.logit(2, 0) = 60;  // after y -> x
  pol.logit(1, 1) = 60;  // after x -> y
  EXPECT_EQ(rollout(pol, pol, env, std::uint64_t{1}).tokens, (std::vector<std::size_t>{1, 0, 1}));
}

RunLog ramp_log(std::size_t n, double max) {
  RunLog log;
  log.max_reward = max;
  for (std::size_t i = 0; i < n; ++i) log.terminal_reward.push_back(max * double(i) / double(n - 1));
  log.moving_avg = moving_average(log.terminal_reward);
  return log;
}

// First 1-based index whose trailing mean (over up to w entries) reaches the
// target; recomputed from scratch at every index.
std::optional<std::size_t> naive_threshold(const std::vector<double>& xs, double target, std::size_t w) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
    double s = 0.0;
    for (std::size_t k = lo; k <= i; ++k) s += xs[k];
    if (s / double(i + 1 - lo) >= target) return i + 1;
  }
  return std::nullopt;
}

TEST(EpisodesToThreshold, Examples) {
  RunLog flat;
  flat.max_reward = 3.0;
  flat.terminal_reward.assign(100, 3.0);
  flat.moving_avg = moving_average(flat.terminal_reward);
  EXPECT_EQ(episodes_to_threshold(flat, 0.9), 1u);

  RunLog zeros;
  zeros.max_reward = 3.0;
  zeros.terminal_reward.assign(100, 0.0);
  zeros.moving_avg = moving_average(zeros.terminal_reward);
  EXPECT_FALSE(episodes_to_threshold(zeros, 0.9).has_value());

  const auto ramp = ramp_log(200, 10.0);
  EXPECT_EQ(naive_threshold(ramp.terminal_reward, 5.0, 50), 125u);
  EXPECT_EQ(episodes_to_threshold(ramp, 0.5, 50), 125u);
  EXPECT_THROW(episodes_to_threshold(ramp, 0.0), Error);
}

TEST(EpisodesToThreshold, MatchesNaiveOnRandomLogs) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    RunLog log;
    log.max_reward = 5.0;
    for (int i = 0; i < 300; ++i) log.terminal_reward.push_back(5.0 * i / 300.0 + noise(rng));
    log.moving_avg = moving_average(log.terminal_reward);
    const double f = 0.3 + 0.1 * (rep % 7);
    EXPECT_EQ(episodes_to_threshold(log, f), naive_threshold(log.terminal_reward, f * 5.0, 50));
  }
}

const Env& small_env() {
  static const Env env = make_env(spec_of(
      {{"good", 1.5}, {"fine", 0.5}, {"bad", -1.0}, {"very", 0.2}}, 6,
      {{{"very", "good"}, 1.0}, {{"good", "bad"}, -0.5}}));
  return env;
}

TEST(Train, ZeroEpisodesGivesEmptyLog) {
  auto pol = PolicyTable::uniform(small_env());
  TrainConfig cfg;
  cfg.episodes = 0;
  EXPECT_EQ(train(pol, small_env(), cfg).episodes(), 0u);
}

TEST(Train, NoLearningHasNoTrend) {
  auto pol = PolicyTable::uniform(small_env());
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.episodes = 2000;
  cfg.scheme = Scheme::kScarExact;
  const auto log = train(pol, small_env(), cfg);
  // Ordinary least squares slope of reward on episode index and its t value.
  const double n = double(log.episodes());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < log.episodes(); ++i) {
    mx += double(i);
    my += log.terminal_reward[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log.episodes(); ++i) {
    sxx += (double(i) - mx) * (double(i) - mx);
    sxy += (double(i) - mx) * (log.terminal_reward[i] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0;
  for (std::size_t i = 0; i < log.episodes(); ++i) {
    const double r = log.terminal_reward[i] - my - slope * (double(i) - mx);
    sse += r * r;
  }
  const double se = std::sqrt(sse / (n - 2) / sxx);
  EXPECT_LT(std::abs(slope / se), 1.96);
  for (std::size_t t = 0; t < pol.rows(); ++t) {
    for (std::size_t a = 0; a < pol.vocab_size(); ++a) EXPECT_EQ(pol.logit(t, a), 0.0);
  }
  EXPECT_LE(log.max_return_residual, 1e-9 * std::max(1.0, log.max_reward));
}

TEST(Train, ReproducibleAndConserving) {
  for (auto scheme : {Scheme::kSparse, Scheme::kUniform, Scheme::kEndConcentrated, Scheme::kScarExact,
                      Scheme::kScarOwen}) {
    TrainConfig cfg;
    cfg.scheme = scheme;
    cfg.episodes = 150;
    cfg.seed = 4;
    auto p1 = PolicyTable::uniform(small_env());
    auto p2 = PolicyTable::uniform(small_env());
    const auto a = train(p1, small_env(), cfg);
    const auto b = train(p2, small_env(), cfg);
    EXPECT_EQ(a.terminal_reward, b.terminal_reward);
    EXPECT_EQ(a.kl, b.kl);
    EXPECT_LE(a.max_conservation_residual, 1e-9 * std::max(1.0, a.max_reward));
    EXPECT_LE(a.max_return_residual, 1e-9 * std::max(1.0, a.max_reward));
    EXPECT_EQ(a.moving_avg.size(), 150u);
    if (scheme == Scheme::kScarExact || scheme == Scheme::kScarOwen) {
      EXPECT_GT(std::accumulate(a.oracle_evals.begin(), a.oracle_evals.end(), std::size_t{0}), 0u);
    }
  }
}

TEST(Train, LearningImprovesReward) {
  TrainConfig cfg;
  cfg.scheme = Scheme::kScarExact;
  cfg.alpha = 1.0;
  cfg.episodes = 800;
  auto pol = PolicyTable::uniform(small_env());
  const auto log = train(pol, small_env(), cfg);
  EXPECT_GT(log.moving_avg.back(), log.moving_avg[49] + 1.0);
}

TEST(Train, PreviousTokenOrderTrains) {
  TrainConfig cfg;
  cfg.order = PolicyOrder::kPreviousToken;
  cfg.scheme = Scheme::kScarOwen;
  cfg.granularity = scar::segmentation::Granularity::kSentence;
  cfg.episodes = 100;
  auto pol = PolicyTable::uniform(small_env(), PolicyOrder::kPreviousToken);
  EXPECT_EQ(train(pol, small_env(), cfg).episodes(), 100u);
  cfg.granularity = scar::segmentation::Granularity::kSpan;
  EXPECT_THROW(train(pol, small_env(), cfg), Error);
}

TEST(CompareSchemes, ShapeOfReport) {
  BenchConfig cfg;
  cfg.schemes = {Scheme::kSparse, Scheme::kUniform, Scheme::kSparse};
  cfg.seeds = {1, 2, 3};
  cfg.base.episodes = 120;
  const auto rep = compare_schemes(small_env(), cfg);
  EXPECT_EQ(rep.row_count(), 3u * 3u * 120u);
  ASSERT_EQ(rep.schemes.size(), 3u);
  EXPECT_EQ(rep.schemes[0].name, "sparse");
  EXPECT_EQ(rep.schemes[2].name, "sparse#2");
  // Same scheme, same seeds: indistinguishable (here identical) curves.
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(rep.schemes[0].runs[k].terminal_reward, rep.schemes[2].runs[k].terminal_reward);
  }
  EXPECT_LE(rep.schemes[0].q1_final_moving_avg, rep.schemes[2].q3_final_moving_avg);
  EXPECT_LE(rep.schemes[2].q1_final_moving_avg, rep.schemes[0].q3_final_moving_avg);

  std::ostringstream csv;
  write_csv(rep, csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "scheme,seed,episode,terminal_reward,moving_avg,oracle_evals,kl");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, rep.row_count());

  const auto svg = render_svg(rep);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("sparse#2"), std::string::npos);

  const auto summary = summary_json(rep);
  EXPECT_EQ(summary["schemes"].size(), 3u);
  EXPECT_TRUE(summary["schemes"][0].contains("median_episodes_to_threshold"));
}

TEST(CompareSchemes, Preconditions) {
  BenchConfig cfg;
  cfg.schemes = {Scheme::kSparse};
  cfg.seeds = {1, 2, 3};
  EXPECT_THROW(compare_schemes(small_env(), cfg), Error);
  cfg.schemes = {Scheme::kSparse, Scheme::kUniform};
  cfg.seeds = {1, 2};
  EXPECT_THROW(compare_schemes(small_env(), cfg), Error);
}

// Under reward-to-go, the uniform scheme hands step t only the share of the
// terminal reward that lies at or after t: R (T - t + 1) / T.
TEST(RewardAssigner, UniformRewardToGoIsTruncated) {
  const auto& env = small_env();
  TrainConfig cfg;
  cfg.scheme = Scheme::kUniform;
  cfg.alpha = 1.0;
  cfg.beta = 0.0;
  RewardAssigner assign(env, cfg);
  const auto pol = PolicyTable::uniform(env);
  const auto r = rollout(pol, pol, env, std::uint64_t{9});
  const auto shaped = assign.assign(r).shaped;
  const double T = double(env.horizon());
  double to_go = 0.0;
  for (std::size_t t = env.horizon(); t >= 1; --t) {
    to_go += shaped.r_total[t - 1];
    EXPECT_NEAR(to_go, r.terminal_reward * (T - double(t) + 1.0) / T, 1e-12);
  }
}

TEST(CompareSchemes, ScarNoSlowerThanSparseOnAdditiveEnv) {
  const auto env = make_env(spec_of({{"good", 1.0}, {"fine", 0.3}, {"bad", -1.0}, {"awful", -1.5}}, 8));
  BenchConfig cfg;
  cfg.schemes = {Scheme::kSparse, Scheme::kScarExact};
  cfg.seeds = {1, 2, 3, 4, 5};
  cfg.base.alpha = 1.0;
  cfg.base.episodes = 1500;
  const auto rep = compare_schemes(env, cfg);
  const auto sparse = rep.schemes[0].median_episodes_to_threshold;
  const auto scar = rep.schemes[1].median_episodes_to_threshold;
  ASSERT_TRUE(scar.has_value());
  if (sparse) {
    EXPECT_LE(*scar, *sparse);
  }
}

TEST(Quantile, Interpolates) {
  EXPECT_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_EQ(quantile({5}, 0.25), 5.0);
  EXPECT_EQ(quantile({1, 2, 3}, 0.5), 2.0);
}

}  // namespace
