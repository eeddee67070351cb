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
#include <numeric>
#include <random>
#include <vector>

#include "scar/error.hpp"
#include "scar/shaping/shaping.hpp"

namespace {

using scar::Error;
using scar::ErrorKind;
using namespace scar::shaping;
using Vec = std::vector<double>;

double sum(const Vec& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(KlPenalty, Examples) {
  EXPECT_EQ(kl_penalty({{-1.0, -0.5}, {-1.0, -0.5}}, 0.3), (Vec{0.0, 0.0}));
  EXPECT_EQ(kl_penalty({{-1.0, -0.5}, {-2.0, -0.1}}, 0.0), (Vec{0.0, 0.0}));
  const auto r = kl_penalty({{-1.0}, {-2.0}}, 0.2);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0], -0.2, 1e-15);
}

TEST(KlPenalty, Rejections) {
  EXPECT_THROW(kl_penalty({{-1.0, -1.0}, {-1.0}}, 0.1), Error);
  EXPECT_THROW(kl_penalty({{0.5}, {-1.0}}, 0.1), Error);
  EXPECT_THROW(kl_penalty({{-1.0}, {-1.0}}, -0.1), Error);
  EXPECT_THROW(kl_penalty({{}, {}}, 0.1), Error);
}

TEST(Placement, Examples) {
  EXPECT_EQ(place_shap_rewards(Vec{1, 2}, {2, 4}, 4), (Vec{0, 1, 0, 2}));
  EXPECT_EQ(place_shap_rewards(Vec{5}, {3}, 3), (Vec{0, 0, 5}));
  EXPECT_EQ(place_shap_rewards(Vec{3, -1, 4}, {1, 2, 3}, 3), (Vec{3, -1, 4}));
}

TEST(Placement, EosStepGetsNoCredit) {
  EXPECT_EQ(place_shap_rewards(Vec{1, 2}, {1, 2}, 3, true), (Vec{1, 2, 0}));
  EXPECT_THROW(place_shap_rewards(Vec{1, 2}, {1, 2}, 3), Error);
}

TEST(Placement, BadTimestepsRejected) {
  EXPECT_THROW(place_shap_rewards(Vec{1, 2}, {2, 2}, 2), Error);
  EXPECT_THROW(place_shap_rewards(Vec{1, 2}, {0, 2}, 2), Error);
  EXPECT_THROW(place_shap_rewards(Vec{1}, {1, 2}, 2), Error);
  EXPECT_THROW(place_shap_rewards(Vec{1, 2}, {1, 3}, 4), Error);
}

TEST(Combine, Examples) {
  const Vec kl{-0.1, 0.2, 0.0, 0.3};
  const auto sparse = combine(kl, Vec{0, 1, 0, 2}, 3.0, 0.0);
  EXPECT_EQ(sparse.r_total, (Vec{-0.1, 0.2, 0.0, 3.3}));
  const auto dense = combine(Vec(4, 0.0), Vec{0, 1, 0, 2}, 3.0, 1.0);
  EXPECT_EQ(dense.r_total, (Vec{0, 1, 0, 2}));
  const auto half = combine(Vec(4, 0.0), Vec{0, 1, 0, 2}, 3.0, 0.5);
  EXPECT_EQ(half.r_total, (Vec{0, 0.5, 0, 2.5}));
  EXPECT_THROW(combine(kl, kl, 1.0, 1.5), Error);
  EXPECT_THROW(combine(kl, kl, 1.0, -0.1), Error);
}

TEST(ReturnEquality, Examples) {
  const Vec kl{0.1, -0.2, 0.05};
  const Vec shap{1.0, -0.5, 2.5};
  EXPECT_LE(verify_return_equality(combine(kl, shap, 3.0, 0.8)), return_tolerance(3.0));
  Vec broken = shap;
  for (auto& x : broken) x *= 0.9;
  EXPECT_NEAR(verify_return_equality(combine(kl, broken, 3.0, 1.0)), 0.3, 1e-12);
  EXPECT_EQ(verify_return_equality(combine(Vec{0, 0, 0}, Vec{9, 9, 9}, 3.0, 0.0)), 0.0);
}

// Random trajectories with efficiency-satisfying attributions, alpha grid.
TEST(ReturnEquality, RandomTrajectories) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0), lp(-6.0, 0.0);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t T = 1 + rng() % 64;
    TrajectoryLogProbs traj;
    for (std::size_t t = 0; t < T; ++t) {
      traj.logp_policy.push_back(lp(rng));
      traj.logp_ref.push_back(lp(rng));
    }
    std::vector<std::size_t> ts;
    for (std::size_t t = 1; t < T; ++t) {
      if (rng() % 3 == 0) ts.push_back(t);
    }
    ts.push_back(T);
    Vec values(ts.size());
    for (auto& v : values) v = u(rng);
    const double r_terminal = sum(values);
    const auto r_kl = kl_penalty(traj, 0.1);
    const auto r_shap = place_shap_rewards(values, ts, T);
    EXPECT_NEAR(sum(r_shap), r_terminal, 1e-12);
    for (double a : {0.0, 0.25, 0.5, 0.8, 1.0}) {
      EXPECT_LE(verify_return_equality(combine(r_kl, r_shap, r_terminal, a)), return_tolerance(r_terminal));
    }
    const auto t0 = combine(r_kl, r_shap, r_terminal, 0.0).r_total;
    const auto t1 = combine(r_kl, r_shap, r_terminal, 1.0).r_total;
    const auto tm = combine(r_kl, r_shap, r_terminal, 0.3).r_total;
    for (std::size_t t = 0; t < T; ++t) {
      EXPECT_NEAR(tm[t], 0.7 * t0[t] + 0.3 * t1[t], 1e-12 * std::max(1.0, std::abs(tm[t])));
      EXPECT_EQ(t0[t], r_kl[t] + (t + 1 == T ? r_terminal : 0.0));
    }
  }
}

TEST(Baselines, Uniform) {
  EXPECT_EQ(uniform_rewards(6, 3), (Vec{2, 2, 2}));
  EXPECT_EQ(uniform_rewards(0, 5), Vec(5, 0.0));
  EXPECT_EQ(uniform_rewards(1, 1), (Vec{1}));
}

TEST(Baselines, EndConcentrated) {
  const auto r = end_concentrated_rewards(10, 2, std::log(4.0));
  EXPECT_NEAR(r[0], 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(r[1], 20.0 / 3.0, 1e-12);
  EXPECT_EQ(end_concentrated_rewards(-2.5, 1, 4.0), (Vec{-2.5}));
  const auto flat = end_concentrated_rewards(6, 3, 1e-9);
  for (double x : flat) EXPECT_NEAR(x, 2.0, 1e-8);
  for (double x : end_concentrated_rewards(-3, 7, 4.0)) EXPECT_LT(x, 0.0);
  EXPECT_THROW(end_concentrated_rewards(1, 3, 0.0), Error);
}

TEST(Baselines, Conservation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int rep = 0; rep < 200; ++rep) {
    const double r = u(rng);
    const std::size_t T = 1 + rng() % 100;
    EXPECT_NEAR(sum(uniform_rewards(r, T)), r, 1e-12 * std::max(1.0, std::abs(r)));
    EXPECT_NEAR(sum(end_concentrated_rewards(r, T, 0.5 + rep % 8)), r, 1e-12 * std::max(1.0, std::abs(r)));
  }
}

TEST(ShapingConfig, DefaultsAndValidation) {
  ShapingConfig c;
  EXPECT_EQ(c.alpha, 0.8);
  EXPECT_EQ(ShapingConfig::kSummarizationAlpha, 1.0);
  EXPECT_NO_THROW(c.validate());
  c.gamma = 0.99;
  EXPECT_THROW(c.validate(), Error);
  c.gamma = 1.0;
  c.alpha = 1.01;
  EXPECT_THROW(c.validate(), Error);
}

}  // namespace
