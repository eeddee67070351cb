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
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "scar/error.hpp"
#include "scar/oracle/lexicon.hpp"
#include "scar/segmentation/token_sequence.hpp"

namespace scar::sim {

struct VocabEntry {
  std::string surface;
  double weight = 0.0;
};

struct EnvSpec {
  std::vector<VocabEntry> vocab;
  oracle::LexiconRM::Bigrams bigram_bonus;
  std::size_t horizon = 0;
  std::string prompt;
  std::uint64_t seed = 0;

  void validate() const {
    require(vocab.size() >= 2, ErrorKind::kInvalidArgument,
            "environment needs at least 2 vocabulary entries, got " + std::to_string(vocab.size()));
    require(horizon >= 2, ErrorKind::kInvalidArgument, "environment horizon must be at least 2");
    for (const auto& v : vocab) {
      require(!v.surface.empty(), ErrorKind::kInvalidArgument, "empty vocabulary surface");
      for (char c : v.surface) {
        require(!segmentation::is_space(c), ErrorKind::kInvalidArgument,
                "vocabulary surface '" + v.surface + "' contains whitespace");
      }
      require(std::isfinite(v.weight), ErrorKind::kInvalidArgument,
              "weight of '" + v.surface + "' is not finite");
    }
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      for (std::size_t j = i + 1; j < vocab.size(); ++j) {
        require(vocab[i].surface != vocab[j].surface, ErrorKind::kInvalidArgument,
                "duplicate vocabulary surface '" + vocab[i].surface + "'");
      }
    }
  }

  // Lexicon RM format plus {"horizon": int, "prompt": string, "seed": int}.
  static EnvSpec from_json(const nlohmann::json& j) {
    require(j.is_object(), ErrorKind::kInvalidArgument, "environment must be a JSON object");
    const auto rm = oracle::LexiconRM::from_json(j);
    EnvSpec spec;
    for (const auto& [word, w] : rm.weights()) spec.vocab.push_back({word, w});
    spec.bigram_bonus = rm.bigrams();
    require(j.contains("horizon") && j["horizon"].is_number_integer() && j["horizon"].get<long long>() > 0,
            ErrorKind::kInvalidArgument, "environment needs a positive integer 'horizon'");
    spec.horizon = j["horizon"].get<std::size_t>();
    if (j.contains("prompt")) {
      require(j["prompt"].is_string(), ErrorKind::kInvalidArgument, "'prompt' must be a string");
      spec.prompt = j["prompt"].get<std::string>();
    }
    if (j.contains("seed")) {
      require(j["seed"].is_number_unsigned(), ErrorKind::kInvalidArgument,
              "'seed' must be a non-negative integer");
      spec.seed = j["seed"].get<std::uint64_t>();
    }
    spec.validate();
    return spec;
  }

  nlohmann::json to_json() const {
    auto j = oracle::LexiconRM(weights(), bigram_bonus).to_json();
    j["horizon"] = horizon;
    j["prompt"] = prompt;
    j["seed"] = seed;
    return j;
  }

  oracle::LexiconRM::Weights weights() const {
    oracle::LexiconRM::Weights w;
    for (const auto& v : vocab) w[v.surface] = v.weight;
    return w;
  }
};

// Deterministic text-generation MDP: the state is the prompt plus the tokens
// emitted so far, each action appends one vocabulary token, and the episode
// ends after `horizon` tokens with the lexicon score of the generated text as
// terminal reward.
class Env {
 public:
  explicit Env(EnvSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    rm_ = std::make_shared<const oracle::LexiconRM>(spec_.weights(), spec_.bigram_bonus);
    bonus_.assign(vocab_size() * vocab_size(), 0.0);
    for (std::size_t a = 0; a < vocab_size(); ++a) {
      for (std::size_t b = 0; b < vocab_size(); ++b) {
        const auto it = spec_.bigram_bonus.find({spec_.vocab[a].surface, spec_.vocab[b].surface});
        if (it != spec_.bigram_bonus.end()) bonus_[a * vocab_size() + b] = it->second;
      }
    }
  }

  const EnvSpec& spec() const noexcept { return spec_; }
  std::size_t vocab_size() const noexcept { return spec_.vocab.size(); }
  std::size_t horizon() const noexcept { return spec_.horizon; }
  const std::string& prompt() const noexcept { return spec_.prompt; }
  std::shared_ptr<const oracle::LexiconRM> reward_model() const { return rm_; }

  segmentation::TokenSequence sequence(const std::vector<std::size_t>& tokens) const {
    std::vector<std::string> words;
    words.reserve(tokens.size());
    for (std::size_t a : tokens) words.push_back(spec_.vocab.at(a).surface);
    return segmentation::TokenSequence::from_words(words);
  }

  double terminal_reward(const std::vector<std::size_t>& tokens) const {
    return rm_->score_text(sequence(tokens).text());
  }

  // Best achievable terminal reward over all vocab^horizon sequences (Viterbi
  // over the last emitted token).
  double max_reward() const {
    const std::size_t v = vocab_size();
    std::vector<double> best(v);
    for (std::size_t a = 0; a < v; ++a) best[a] = spec_.vocab[a].weight;
    for (std::size_t t = 1; t < horizon(); ++t) {
      std::vector<double> next(v, -std::numeric_limits<double>::infinity());
      for (std::size_t b = 0; b < v; ++b) {
        for (std::size_t a = 0; a < v; ++a) {
          next[b] = std::max(next[b], best[a] + bonus_[a * v + b] + spec_.vocab[b].weight);
        }
      }
      best = std::move(next);
    }
    return *std::max_element(best.begin(), best.end());
  }

 private:
  EnvSpec spec_;
  std::shared_ptr<const oracle::LexiconRM> rm_;
  std::vector<double> bonus_;
};

inline Env make_env(EnvSpec spec) { return Env(std::move(spec)); }

}  // namespace scar::sim
