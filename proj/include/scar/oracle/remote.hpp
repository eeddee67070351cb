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
#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "scar/error.hpp"
#include "scar/oracle/score_oracle.hpp"

namespace scar::oracle {

struct RemoteOptions {
  // http://host[:port][/path]; the path defaults to /score.
  std::string endpoint;
  std::chrono::milliseconds timeout{10000};
  // Sent as "Authorization: Bearer <token>" when set.
  std::optional<std::string> auth_token;
  std::size_t batch_size = 32;
};

// Wire format of the scoring protocol.
//   request:  {"prompt": string, "candidates": [string, ...]}
//   response: {"scores": [number, ...]}, same length as candidates
//   failure:  {"error": string} with a non-200 status
inline nlohmann::json make_score_request(std::string_view prompt,
                                         std::span<const std::string> candidates) {
  nlohmann::json j;
  j["prompt"] = std::string(prompt);
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : candidates) j["candidates"].push_back(c);
  return j;
}

inline std::vector<double> parse_score_response(std::string_view body, std::size_t expected) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kMalformedBody, std::string("score response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("scores") || !j["scores"].is_array()) {
    fail(ErrorKind::kMalformedBody, "score response lacks a 'scores' array");
  }
  std::vector<double> scores;
  scores.reserve(j["scores"].size());
  for (const auto& s : j["scores"]) {
    if (!s.is_number()) fail(ErrorKind::kMalformedBody, "score response has a non-numeric score");
    scores.push_back(s.get<double>());
  }
  if (scores.size() != expected) {
    fail(ErrorKind::kLengthMismatch, "score response has " + std::to_string(scores.size()) +
                                         " scores for " + std::to_string(expected) +
                                         " candidates");
  }
  return scores;
}

// ScoreOracle backed by an HTTP scoring service. Each score_batch call posts
// one request per batch_size candidates and concatenates the scores in order.
class RemoteScoreClient final : public ScoreOracle {
 public:
  explicit RemoteScoreClient(RemoteOptions options) : options_(std::move(options)) {
    constexpr std::string_view kScheme = "http://";
    const std::string& url = options_.endpoint;
    require(url.rfind(kScheme, 0) == 0, ErrorKind::kInvalidArgument,
            "remote endpoint must be an http:// URL, got '" + url + "'");
    const std::size_t slash = url.find('/', kScheme.size());
    host_ = slash == std::string::npos ? url : url.substr(0, slash);
    path_ = slash == std::string::npos ? "/score" : url.substr(slash);
    if (path_ == "/") path_ = "/score";
    require(host_.size() > kScheme.size(), ErrorKind::kInvalidArgument,
            "remote endpoint has no host: '" + url + "'");
    options_.batch_size = std::max<std::size_t>(1, options_.batch_size);
  }

  std::vector<double> score_batch(std::string_view prompt,
                                  std::span<const std::string> candidates) const override {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (std::size_t lo = 0; lo < candidates.size(); lo += options_.batch_size) {
      const std::size_t n = std::min(options_.batch_size, candidates.size() - lo);
      const auto part = post(prompt, candidates.subspan(lo, n));
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

  std::string descriptor() const override { return "remote:" + host_ + path_; }

  const RemoteOptions& options() const noexcept { return options_; }

 private:
  std::vector<double> post(std::string_view prompt, std::span<const std::string> batch) const {
    httplib::Client client(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (options_.auth_token) {
      headers.emplace("Authorization", "Bearer " + *options_.auth_token);
    }
    const std::string body = make_score_request(prompt, batch).dump();

    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      const auto elapsed = std::chrono::steady_clock::now() - started;
      if (err == httplib::Error::ConnectionTimeout ||
          (err == httplib::Error::Read && elapsed >= options_.timeout)) {
        fail(ErrorKind::kTimeout, "scoring request to " + host_ + path_ + " timed out");
      }
      fail(ErrorKind::kTransport,
           "scoring request to " + host_ + path_ + " failed: " + httplib::to_string(err));
    }
    if (res->status != 200) {
      std::string detail;
      try {
        const auto j = nlohmann::json::parse(res->body);
        if (j.is_object() && j.contains("error") && j["error"].is_string()) {
          detail = ": " + j["error"].get<std::string>();
        }
      } catch (const nlohmann::json::exception&) {
      }
      fail(ErrorKind::kHttpStatus,
           "scoring service returned HTTP " + std::to_string(res->status) + detail);
    }
    return parse_score_response(res->body, batch.size());
  }

  RemoteOptions options_;
  std::string host_;
  std::string path_;
};

}  // namespace scar::oracle
