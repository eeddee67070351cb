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

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/characteristic.hpp"
#include "scar/oracle/masking.hpp"
#include "scar/oracle/score_oracle.hpp"
#include "scar/oracle/value_cache.hpp"
#include "scar/segmentation/segment.hpp"

namespace scar::oracle {

struct CharacteristicOptions {
  MaskingMode mode;
  // Off: v(empty) = 0 by definition and every other coalition is scored as is.
  // On:  v(S) = r(y_S) - r(y_empty), which absorbs the masked-empty score.
  bool center_baseline = false;
  std::size_t batch_size = 32;
  std::size_t max_in_flight = 1;
  // Attempts after the first for retryable (transport, timeout) failures.
  std::size_t retries = 3;
  std::chrono::milliseconds backoff{20};
  // Optional cross-request store; never changes values.
  std::shared_ptr<ValueCache> shared_cache;
  // Optional counter of texts actually sent to the scorer.
  std::shared_ptr<std::atomic<std::size_t>> score_queries;
};

namespace detail {

inline std::string context_key(const ScoreOracle& rm, std::string_view prompt,
                               const segmentation::SegmentationResult& units,
                               const CharacteristicOptions& opt) {
  std::string key = rm.descriptor();
  key += '\x1f';
  key += to_string(opt.mode.kind);
  key += opt.mode.filler;
  key += opt.center_baseline ? 'c' : 'r';
  key += '\x1f';
  key += std::to_string(prompt.size());
  key += ':';
  key += prompt;
  key += '\x1f';
  for (const auto& u : units.units) {
    key += std::to_string(u.char_begin);
    key += ',';
  }
  key += '\x1f';
  key += units.text;
  return key;
}

inline std::vector<double> score_with_retry(const ScoreOracle& rm, std::string_view prompt,
                                            std::span<const std::string> texts,
                                            std::span<const game::Coalition> coalitions,
                                            const CharacteristicOptions& opt) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      auto scores = rm.score_batch(prompt, texts);
      require(scores.size() == texts.size(), ErrorKind::kLengthMismatch,
              "scorer returned " + std::to_string(scores.size()) + " scores for " +
                  std::to_string(texts.size()) + " candidates");
      if (opt.score_queries) opt.score_queries->fetch_add(texts.size());
      return scores;
    } catch (const Error& e) {
      const std::string who = coalitions.empty() ? std::string("{}") : coalitions.front().to_string();
      if (!e.retryable() || attempt >= opt.retries) {
        fail(e.kind(), std::string(e.what()) + " (coalition " + who + ", " +
                           std::to_string(attempt + 1) + " attempt" + (attempt ? "s" : "") + ")");
      }
      std::this_thread::sleep_for(opt.backoff * (1LL << attempt));
    }
  }
}

}  // namespace detail

// v(S) = r(x, y_S), with y_S built by masking (see build_coalition_text).
// The returned oracle memoizes, coalesces concurrent requests and batches
// distinct ones up to batch_size per scorer call.
inline game::CharacteristicOracle characteristic_from_oracle(
    std::shared_ptr<const ScoreOracle> rm, std::string prompt,
    const segmentation::SegmentationResult& units, CharacteristicOptions options = {}) {
  require(rm != nullptr, ErrorKind::kInvalidArgument, "scorer is null");
  require(!units.units.empty(), ErrorKind::kEmptyInput, "no units to score");

  struct Shared {
    std::shared_ptr<const ScoreOracle> rm;
    std::string prompt;
    segmentation::SegmentationResult units;
    CharacteristicOptions options;
    std::shared_ptr<const std::string> context;
    std::mutex mu;
    std::optional<double> empty_score;
  };
  auto sh = std::make_shared<Shared>();
  sh->rm = std::move(rm);
  sh->prompt = std::move(prompt);
  sh->units = units;
  sh->options = options;
  if (options.shared_cache) {
    sh->context = std::make_shared<const std::string>(
        detail::context_key(*sh->rm, sh->prompt, sh->units, options));
  }

  const std::size_t n = units.size();

  // Raw scorer value of y_S, through the shared cache when present.
  auto raw_scores = [sh](std::span<const game::Coalition> batch) {
    std::vector<double> out(batch.size(), 0.0);
    std::vector<std::size_t> missing;
    std::vector<std::string> texts;
    std::vector<game::Coalition> missing_c;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      if (sh->options.shared_cache) {
        if (auto hit = sh->options.shared_cache->get(sh->context, batch[k])) {
          out[k] = *hit;
          continue;
        }
      }
      missing.push_back(k);
      missing_c.push_back(batch[k]);
      texts.push_back(build_coalition_text(sh->units, batch[k], sh->options.mode));
    }
    if (!texts.empty()) {
      const auto scores =
          detail::score_with_retry(*sh->rm, sh->prompt, texts, missing_c, sh->options);
      for (std::size_t j = 0; j < missing.size(); ++j) {
        require(std::isfinite(scores[j]), ErrorKind::kOracle,
                "scorer returned a non-finite value for coalition " + missing_c[j].to_string());
        out[missing[j]] = scores[j];
        if (sh->options.shared_cache) sh->options.shared_cache->put(sh->context, missing_c[j], scores[j]);
      }
    }
    return out;
  };

  game::BatchGame game = [sh, n, raw_scores](std::span<const game::Coalition> batch) {
    std::vector<double> out(batch.size(), 0.0);
    std::vector<game::Coalition> to_score;
    std::vector<std::size_t> where;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      if (batch[k].is_empty()) continue;  // 0 in both conventions
      to_score.push_back(batch[k]);
      where.push_back(k);
    }
    if (to_score.empty()) return out;
    double baseline = 0.0;
    if (sh->options.center_baseline) {
      std::lock_guard<std::mutex> lock(sh->mu);
      if (!sh->empty_score) {
        const game::Coalition none = game::Coalition::empty(n);
        sh->empty_score = raw_scores(std::span<const game::Coalition>(&none, 1)).front();
      }
      baseline = *sh->empty_score;
    }
    const auto scores = raw_scores(to_score);
    for (std::size_t j = 0; j < where.size(); ++j) out[where[j]] = scores[j] - baseline;
    return out;
  };

  game::OracleOptions oopt;
  oopt.batch_size = options.batch_size;
  oopt.max_in_flight = options.max_in_flight;
  return game::CharacteristicOracle(n, std::move(game), oopt);
}

}  // namespace scar::oracle
