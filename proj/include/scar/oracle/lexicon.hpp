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
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "scar/error.hpp"
#include "scar/oracle/score_oracle.hpp"
#include "scar/segmentation/token_sequence.hpp"

namespace scar::oracle {

// Synthetic reward model: a sum of per-word weights plus bonuses for
// adjacent word pairs. Words are maximal runs of bytes that are neither
// whitespace nor the filler; unknown words weigh 0. Two words are adjacent
// only when exactly one separator byte lies between them, so a masked-out
// word (a run of filler) breaks adjacency. The prompt is ignored.
class LexiconRM final : public ScoreOracle {
 public:
  using Weights = std::map<std::string, double, std::less<>>;
  using Bigrams = std::map<std::pair<std::string, std::string>, double>;

  LexiconRM(Weights weights, Bigrams bigrams, char filler = ' ')
      : weights_(std::move(weights)), bigrams_(std::move(bigrams)), filler_(filler) {
    for (const auto& [word, w] : weights_) {
      require(std::isfinite(w), ErrorKind::kInvalidArgument,
              "lexicon weight for '" + word + "' is not finite");
    }
    for (const auto& [pair, w] : bigrams_) {
      require(std::isfinite(w), ErrorKind::kInvalidArgument,
              "bigram bonus for '" + pair.first + " " + pair.second + "' is not finite");
    }
  }

  // {"weights": {token: number}, "bigrams": [[a, b, number], ...]}
  static LexiconRM from_json(const nlohmann::json& j, char filler = ' ') {
    require(j.is_object(), ErrorKind::kInvalidArgument, "lexicon must be a JSON object");
    Weights weights;
    Bigrams bigrams;
    if (j.contains("weights")) {
      require(j["weights"].is_object(), ErrorKind::kInvalidArgument,
              "lexicon 'weights' must be an object");
      for (const auto& [word, w] : j["weights"].items()) {
        require(w.is_number(), ErrorKind::kInvalidArgument,
                "lexicon weight for '" + word + "' must be a number");
        weights[word] = w.get<double>();
      }
    }
    if (j.contains("bigrams")) {
      require(j["bigrams"].is_array(), ErrorKind::kInvalidArgument,
              "lexicon 'bigrams' must be an array");
      for (const auto& b : j["bigrams"]) {
        require(b.is_array() && b.size() == 3 && b[0].is_string() && b[1].is_string() &&
                    b[2].is_number(),
                ErrorKind::kInvalidArgument, "each bigram must be [string, string, number]");
        bigrams[{b[0].get<std::string>(), b[1].get<std::string>()}] = b[2].get<double>();
      }
    }
    return LexiconRM(std::move(weights), std::move(bigrams), filler);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["weights"] = nlohmann::json::object();
    for (const auto& [word, w] : weights_) j["weights"][word] = w;
    j["bigrams"] = nlohmann::json::array();
    for (const auto& [pair, w] : bigrams_) {
      j["bigrams"].push_back(nlohmann::json::array({pair.first, pair.second, w}));
    }
    return j;
  }

  double score_text(std::string_view text) const {
    double total = 0.0;
    const double* prev_weight = nullptr;
    std::string_view prev_word;
    std::size_t gap = 0;
    std::size_t i = 0;
    while (i < text.size()) {
      if (is_separator(text[i])) {
        ++gap;
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && !is_separator(text[j])) ++j;
      const std::string_view word = text.substr(i, j - i);
      const auto it = weights_.find(word);
      const double* weight = it == weights_.end() ? nullptr : &it->second;
      if (weight) {
        total += *weight;
        if (prev_weight && gap == 1 && !bigrams_.empty()) {
          const auto b = bigrams_.find({std::string(prev_word), std::string(word)});
          if (b != bigrams_.end()) total += b->second;
        }
      }
      prev_weight = weight;
      prev_word = word;
      gap = 0;
      i = j;
    }
    return total;
  }

  std::vector<double> score_batch(std::string_view,
                                  std::span<const std::string> candidates) const override {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(score_text(c));
    return out;
  }

  std::string descriptor() const override {
    // FNV-1a over the canonical JSON form.
    const std::string canon = to_json().dump() + filler_;
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("lexicon:") + buf;
  }

  const Weights& weights() const noexcept { return weights_; }
  const Bigrams& bigrams() const noexcept { return bigrams_; }
  char filler() const noexcept { return filler_; }

 private:
  bool is_separator(char c) const { return segmentation::is_space(c) || c == filler_; }

  Weights weights_;
  Bigrams bigrams_;
  char filler_;
};

}  // namespace scar::oracle
