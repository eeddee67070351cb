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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scar::oracle {

// A sequence scorer r(x, y): prompt plus candidate completions in, one finite
// score per candidate out. Implementations must be deterministic for a fixed
// descriptor and safe to call concurrently.
class ScoreOracle {
 public:
  virtual ~ScoreOracle() = default;

  virtual std::vector<double> score_batch(std::string_view prompt,
                                          std::span<const std::string> candidates) const = 0;

  // Stable identity of the scorer, used to scope caches.
  virtual std::string descriptor() const = 0;

  double score(std::string_view prompt, const std::string& candidate) const {
    return score_batch(prompt, std::span<const std::string>(&candidate, 1)).front();
  }
};

// Adapts a plain function; handy for tests and for wrapping other scorers.
class FunctionScoreOracle final : public ScoreOracle {
 public:
  using Fn = std::function<double(std::string_view prompt, const std::string& candidate)>;

  FunctionScoreOracle(Fn fn, std::string descriptor)
      : fn_(std::move(fn)), descriptor_(std::move(descriptor)) {}

  std::vector<double> score_batch(std::string_view prompt,
                                  std::span<const std::string> candidates) const override {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(fn_(prompt, c));
    return out;
  }

  std::string descriptor() const override { return descriptor_; }

 private:
  Fn fn_;
  std::string descriptor_;
};

}  // namespace scar::oracle
