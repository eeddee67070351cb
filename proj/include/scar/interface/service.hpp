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
#include <cstddef>
#include <memory>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "scar/error.hpp"
#include "scar/interface/api.hpp"
#include "scar/interface/log.hpp"
#include "scar/oracle/value_cache.hpp"

namespace scar::interface {

struct ServiceOptions {
  std::size_t max_body_bytes = 1 << 20;
  std::size_t cache_entries = 1'000'000;
};

inline int http_status_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::kValidation: return 400;
    case ErrorCategory::kSemantic: return 422;
    case ErrorCategory::kUpstream: return 502;
  }
  return 500;
}

// HTTP front end over the shared request core. Memoized coalition values are
// shared across requests through one bounded LRU cache.
class Service {
 public:
  explicit Service(ServiceOptions opts = {}, std::shared_ptr<Logger> logger = nullptr)
      : opts_(opts),
        cache_(std::make_shared<oracle::ValueCache>(opts.cache_entries)),
        log_(logger ? std::move(logger) : std::make_shared<Logger>()) {
    server_.set_payload_max_length(opts_.max_body_bytes);
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const std::string kind = res.status == 413 ? "payload_too_large"
                               : res.status == 404 ? "not_found"
                                                   : "http_" + std::to_string(res.status);
      res.set_content(json{{"error", httplib::status_message(res.status)}, {"kind", kind}}.dump(),
                      "application/json");
    });
    server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server_.Post("/v1/attribute", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, "attribute", [this](const json& doc, json& fields) {
        auto out = attribute(parse_attribute_request(doc), cache_);
        fields["evals_used"] = out.evals_used;
        fields["score_queries"] = out.score_queries;
        if (out.body.contains("id")) fields["id"] = out.body["id"];
        return std::move(out.body);
      });
    });
    server_.Post("/v1/shape", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, "shape", [](const json& doc, json&) { return shape(parse_shape_request(doc)); });
    });
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;
  ~Service() { stop(); }

  // Binds `host:port`; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    require(bound > 0, ErrorKind::kPrecondition, "cannot bind " + host + ":" + std::to_string(port));
    port_ = bound;
    return bound;
  }

  // Blocks until stop().
  void listen() {
    log_->info("listening", {{"port", port_}});
    server_.listen_after_bind();
  }

  void start_background() {
    thread_ = std::thread([this] { listen(); });
    server_.wait_until_ready();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }
  const std::shared_ptr<oracle::ValueCache>& cache() const noexcept { return cache_; }

 private:
  template <class Fn>
  void handle(const httplib::Request& req, httplib::Response& res, const char* route, Fn&& fn) {
    const auto started = std::chrono::steady_clock::now();
    json fields{{"route", route}, {"bytes", req.body.size()}};
    try {
      res.set_content(fn(parse_document(req.body), fields).dump(), "application/json");
      res.status = 200;
    } catch (const Error& e) {
      res.status = http_status_for(e);
      res.set_content(error_json(e).dump(), "application/json");
      fields["kind"] = std::string(to_string(e.kind()));
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}, {"kind", "internal"}}.dump(), "application/json");
    }
    fields["status"] = res.status;
    fields["elapsed_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    log_->log(res.status == 200 ? LogLevel::kInfo : LogLevel::kWarn, "request", std::move(fields));
  }

  ServiceOptions opts_;
  std::shared_ptr<oracle::ValueCache> cache_;
  std::shared_ptr<Logger> log_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace scar::interface
