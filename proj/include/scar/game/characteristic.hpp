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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/coalition.hpp"

namespace scar::game {

// Evaluates a batch of coalitions; output[i] is v(coalitions[i]).
using BatchGame = std::function<std::vector<double>(std::span<const Coalition>)>;
using PointGame = std::function<double(const Coalition&)>;

struct OracleOptions {
  // Coalitions handed to the underlying game per call.
  std::size_t batch_size = 32;
  // Batches dispatched concurrently within one evaluate_batch call.
  std::size_t max_in_flight = 1;
};

// Memoized coalition-value function v: 2^P -> R.
//
// Copies are handles onto the same memo, so a solver and its caller observe
// one eval counter. The memo is a read-through cache with request coalescing:
// concurrent callers asking for the same missing coalition share a single
// underlying evaluation, and the counter increments once per distinct
// coalition resolved through the game.
class CharacteristicOracle {
 public:
  CharacteristicOracle(std::size_t n_players, BatchGame game, OracleOptions options = {})
      : state_(std::make_shared<State>()) {
    require(n_players >= 1, ErrorKind::kPrecondition, "oracle needs at least one player");
    require(n_players <= kMaxPlayers, ErrorKind::kCapacity,
            "oracle width exceeds " + std::to_string(kMaxPlayers) + " players");
    require(static_cast<bool>(game), ErrorKind::kInvalidArgument, "oracle game is empty");
    state_->n_players = n_players;
    state_->game = std::move(game);
    state_->options = options;
    state_->options.batch_size = std::max<std::size_t>(1, options.batch_size);
    state_->options.max_in_flight = std::max<std::size_t>(1, options.max_in_flight);
  }

  static CharacteristicOracle from_function(std::size_t n_players, PointGame fn,
                                            OracleOptions options = {}) {
    return CharacteristicOracle(
        n_players,
        [fn = std::move(fn)](std::span<const Coalition> batch) {
          std::vector<double> out;
          out.reserve(batch.size());
          for (const auto& c : batch) out.push_back(fn(c));
          return out;
        },
        options);
  }

  std::size_t n_players() const noexcept { return state_->n_players; }
  const OracleOptions& options() const noexcept { return state_->options; }

  // Number of distinct coalitions resolved through the underlying game.
  std::size_t eval_count() const noexcept { return state_->eval_counter.load(); }

  double evaluate(const Coalition& c) const {
    return evaluate_batch(std::span<const Coalition>(&c, 1)).front();
  }

  double operator()(const Coalition& c) const { return evaluate(c); }

  std::vector<double> evaluate_batch(std::span<const Coalition> coalitions) const {
    State& st = *state_;
    std::vector<double> out(coalitions.size(), 0.0);

    // Coalitions this call owns, and the positions in `out` waiting on them.
    std::vector<Coalition> owned;
    std::vector<std::shared_ptr<std::promise<double>>> promises;
    std::vector<std::pair<std::size_t, std::shared_future<double>>> waiting;

    {
      std::lock_guard<std::mutex> lock(st.mu);
      for (std::size_t k = 0; k < coalitions.size(); ++k) {
        const Coalition& c = coalitions[k];
        require(c.n_players() == st.n_players, ErrorKind::kInvalidArgument,
                "coalition width " + std::to_string(c.n_players()) +
                    " does not match oracle width " + std::to_string(st.n_players));
        if (auto it = st.memo.find(c); it != st.memo.end()) {
          out[k] = it->second;
          continue;
        }
        auto fit = st.in_flight.find(c);
        if (fit == st.in_flight.end()) {
          auto promise = std::make_shared<std::promise<double>>();
          fit = st.in_flight.emplace(c, promise->get_future().share()).first;
          owned.push_back(c);
          promises.push_back(std::move(promise));
        }
        waiting.emplace_back(k, fit->second);
      }
    }

    if (!owned.empty()) resolve(owned, promises);

    for (auto& [k, fut] : waiting) {
      out[k] = fut.get();
    }
    return out;
  }

 private:
  struct State {
    std::size_t n_players = 0;
    BatchGame game;
    OracleOptions options;
    std::mutex mu;
    std::unordered_map<Coalition, double, CoalitionHash> memo;
    std::unordered_map<Coalition, std::shared_future<double>, CoalitionHash> in_flight;
    std::atomic<std::size_t> eval_counter{0};
  };

  void resolve(const std::vector<Coalition>& owned,
               const std::vector<std::shared_ptr<std::promise<double>>>& promises) const {
    State& st = *state_;
    const std::size_t bs = st.options.batch_size;
    const std::size_t n_chunks = (owned.size() + bs - 1) / bs;
    std::vector<bool> done(n_chunks, false);

    auto run_chunk = [&](std::size_t chunk) {
      const std::size_t lo = chunk * bs;
      const std::size_t hi = std::min(owned.size(), lo + bs);
      std::span<const Coalition> part(owned.data() + lo, hi - lo);
      std::vector<double> values = st.game(part);
      require(values.size() == part.size(), ErrorKind::kOracle,
              "game returned " + std::to_string(values.size()) + " values for " +
                  std::to_string(part.size()) + " coalitions");
      for (std::size_t j = 0; j < values.size(); ++j) {
        require(std::isfinite(values[j]), ErrorKind::kOracle,
                "non-finite value for coalition " + part[j].to_string());
      }
      std::lock_guard<std::mutex> lock(st.mu);
      for (std::size_t j = 0; j < values.size(); ++j) {
        st.memo.emplace(part[j], values[j]);
        st.in_flight.erase(part[j]);
        st.eval_counter.fetch_add(1);
        promises[lo + j]->set_value(values[j]);
      }
    };

    std::exception_ptr failure;
    if (st.options.max_in_flight <= 1 || n_chunks <= 1) {
      for (std::size_t chunk = 0; chunk < n_chunks && !failure; ++chunk) {
        try {
          run_chunk(chunk);
          done[chunk] = true;
        } catch (...) {
          failure = std::current_exception();
        }
      }
    } else {
      for (std::size_t first = 0; first < n_chunks && !failure;
           first += st.options.max_in_flight) {
        const std::size_t last = std::min(n_chunks, first + st.options.max_in_flight);
        std::vector<std::future<void>> wave;
        for (std::size_t chunk = first; chunk < last; ++chunk) {
          wave.push_back(std::async(std::launch::async, run_chunk, chunk));
        }
        for (std::size_t chunk = first; chunk < last; ++chunk) {
          try {
            wave[chunk - first].get();
            done[chunk] = true;
          } catch (...) {
            if (!failure) failure = std::current_exception();
          }
        }
      }
    }

    if (failure) {
      std::lock_guard<std::mutex> lock(st.mu);
      for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
        if (done[chunk]) continue;
        const std::size_t lo = chunk * bs;
        const std::size_t hi = std::min(owned.size(), lo + bs);
        for (std::size_t j = lo; j < hi; ++j) {
          if (st.memo.count(owned[j])) continue;
          st.in_flight.erase(owned[j]);
          promises[j]->set_exception(failure);
        }
      }
      std::rethrow_exception(failure);
    }
  }

  std::shared_ptr<State> state_;
};

}  // namespace scar::game
