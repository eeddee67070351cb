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
#include <string>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/attribution.hpp"

// Timesteps are 1-based in every contract here (t = 1..T, the step that emits
// token t); storage is 0-based, so timestep t lives at index t - 1.
namespace scar::shaping {

struct TrajectoryLogProbs {
  std::vector<double> logp_policy;
  std::vector<double> logp_ref;

  std::size_t horizon() const noexcept { return logp_policy.size(); }

  void validate() const {
    require(logp_policy.size() == logp_ref.size(), ErrorKind::kInvalidArgument,
            "logp_policy has " + std::to_string(logp_policy.size()) + " entries, logp_ref " +
                std::to_string(logp_ref.size()));
    require(!logp_policy.empty(), ErrorKind::kInvalidArgument, "trajectory is empty");
    for (std::size_t t = 0; t < logp_policy.size(); ++t) {
      for (double lp : {logp_policy[t], logp_ref[t]}) {
        require(std::isfinite(lp) && lp <= 0.0, ErrorKind::kInvalidArgument,
                "log-probability at timestep " + std::to_string(t + 1) +
                    " must be finite and <= 0");
      }
    }
  }
};

// alpha: 0.8 by default, 1.0 for the summarization setting.
struct ShapingConfig {
  static constexpr double kDefaultAlpha = 0.8;
  static constexpr double kSummarizationAlpha = 1.0;

  double alpha = kDefaultAlpha;
  double beta = 0.0;
  double gamma = 1.0;

  void validate() const {
    require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::kInvalidArgument,
            "alpha must lie in [0, 1], got " + std::to_string(alpha));
    require(beta >= 0.0 && std::isfinite(beta), ErrorKind::kInvalidArgument,
            "beta must be a non-negative number");
    require(gamma == 1.0, ErrorKind::kInvalidArgument,
            "only gamma = 1 (undiscounted finite horizon) is supported");
  }
};

struct ShapedTrajectory {
  std::vector<double> r_kl;
  std::vector<double> r_shap;
  double r_terminal = 0.0;
  std::vector<double> r_total;
  double alpha = 0.0;

  std::size_t horizon() const noexcept { return r_total.size(); }
};

// r_kl[t] = -beta * (log pi(y_t) - log pi_ref(y_t))
inline std::vector<double> kl_penalty(const TrajectoryLogProbs& lp, double beta) {
  lp.validate();
  require(beta >= 0.0 && std::isfinite(beta), ErrorKind::kInvalidArgument,
          "beta must be a non-negative number");
  std::vector<double> out(lp.horizon());
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = -beta * (lp.logp_policy[t] - lp.logp_ref[t]);
  }
  return out;
}

// Unit i's credit lands on its completion timestep t_i; every other step is 0.
// With eos_terminated the final step T emits an end-of-sequence token that is
// not a player, so the last unit may complete at T - 1.
inline std::vector<double> place_shap_rewards(const std::vector<double>& values,
                                              const std::vector<std::size_t>& t_list,
                                              std::size_t horizon, bool eos_terminated = false) {
  require(horizon >= 1, ErrorKind::kInvalidArgument, "horizon must be at least 1");
  require(values.size() == t_list.size(), ErrorKind::kInvalidArgument,
          std::to_string(values.size()) + " attributions for " + std::to_string(t_list.size()) +
              " completion timesteps");
  require(!t_list.empty(), ErrorKind::kInvalidArgument, "no completion timesteps");
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    require(t_list[i] >= 1 && (i == 0 || t_list[i] > t_list[i - 1]),
            ErrorKind::kInvalidArgument, "completion timesteps must be strictly increasing from 1");
  }
  const std::size_t last = eos_terminated ? horizon - 1 : horizon;
  require(t_list.back() == last, ErrorKind::kInvalidArgument,
          "last completion timestep is " + std::to_string(t_list.back()) + ", expected " +
              std::to_string(last));
  std::vector<double> out(horizon, 0.0);
  for (std::size_t i = 0; i < t_list.size(); ++i) out[t_list[i] - 1] = values[i];
  return out;
}

inline std::vector<double> place_shap_rewards(const game::AttributionVector& attribution,
                                              const std::vector<std::size_t>& t_list,
                                              std::size_t horizon, bool eos_terminated = false) {
  return place_shap_rewards(attribution.values, t_list, horizon, eos_terminated);
}

// r_total[t] = r_kl[t] + alpha r_shap[t] + (1 - alpha) [t = T] r_terminal
inline ShapedTrajectory combine(const std::vector<double>& r_kl, const std::vector<double>& r_shap,
                                double r_terminal, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::kInvalidArgument,
          "alpha must lie in [0, 1], got " + std::to_string(alpha));
  require(r_kl.size() == r_shap.size(), ErrorKind::kInvalidArgument,
          "r_kl and r_shap lengths differ");
  require(!r_kl.empty(), ErrorKind::kInvalidArgument, "trajectory is empty");
  require(std::isfinite(r_terminal), ErrorKind::kInvalidArgument, "terminal reward is not finite");
  ShapedTrajectory out;
  out.r_kl = r_kl;
  out.r_shap = r_shap;
  out.r_terminal = r_terminal;
  out.alpha = alpha;
  out.r_total.resize(r_kl.size());
  const std::size_t last = r_kl.size() - 1;
  for (std::size_t t = 0; t < r_kl.size(); ++t) {
    out.r_total[t] = r_kl[t] + alpha * r_shap[t] + (t == last ? (1.0 - alpha) * r_terminal : 0.0);
  }
  return out;
}

// |sum_t r_total[t] - sum_t (r_kl[t] + [t = T] r_terminal)|. Zero (to rounding)
// exactly when the placed credit sums to the terminal reward, for any alpha.
inline double verify_return_equality(const ShapedTrajectory& traj) {
  double shaped = 0.0;
  double original = 0.0;
  for (std::size_t t = 0; t < traj.r_total.size(); ++t) {
    shaped += traj.r_total[t];
    original += traj.r_kl[t];
  }
  original += traj.r_terminal;
  return std::abs(shaped - original);
}

inline double return_tolerance(double r_terminal) {
  return 1e-9 * std::max(1.0, std::abs(r_terminal));
}

// Baseline: the terminal reward spread evenly over all T steps.
inline std::vector<double> uniform_rewards(double r_terminal, std::size_t horizon) {
  require(horizon >= 1, ErrorKind::kInvalidArgument, "horizon must be at least 1");
  return std::vector<double>(horizon, r_terminal / static_cast<double>(horizon));
}

// Baseline mimicking attention-style credit: weights proportional to
// exp(sharpness * t / T), so later tokens get more, and every entry carries
// the sign of r_terminal.
inline std::vector<double> end_concentrated_rewards(double r_terminal, std::size_t horizon,
                                                    double sharpness) {
  require(horizon >= 1, ErrorKind::kInvalidArgument, "horizon must be at least 1");
  require(sharpness > 0.0 && std::isfinite(sharpness), ErrorKind::kInvalidArgument,
          "sharpness must be positive");
  const double T = static_cast<double>(horizon);
  std::vector<double> w(horizon);
  double z = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    // Shifted by the largest exponent (t = T) for stability.
    w[t - 1] = std::exp(sharpness * (static_cast<double>(t) - T) / T);
    z += w[t - 1];
  }
  for (auto& x : w) x = r_terminal * (x / z);
  return w;
}

}  // namespace scar::shaping
