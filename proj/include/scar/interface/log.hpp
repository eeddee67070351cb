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

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

#include "json.hpp"

namespace scar::interface {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

// Level from SCAR_LOG_LEVEL (debug|info|warn|error|off); info when unset.
inline LogLevel log_level_from_env() {
  const char* raw = std::getenv("SCAR_LOG_LEVEL");
  const std::string_view s = raw ? raw : "";
  if (s == "debug") return LogLevel::kDebug;
  if (s == "warn") return LogLevel::kWarn;
  if (s == "error") return LogLevel::kError;
  if (s == "off") return LogLevel::kOff;
  return LogLevel::kInfo;
}

// One JSON object per line on stderr.
class Logger {
 public:
  explicit Logger(LogLevel level = log_level_from_env()) : level_(level) {}

  void log(LogLevel level, std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
    if (level < level_ || level_ == LogLevel::kOff) return;
    static constexpr const char* kNames[] = {"debug", "info", "warn", "error"};
    fields["level"] = kNames[static_cast<int>(level)];
    fields["event"] = std::string(event);
    fields["ts_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
    const std::string line = fields.dump();
    std::lock_guard<std::mutex> lock(mu_);
    std::cerr << line << '\n';
  }

  void info(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
    log(LogLevel::kInfo, event, std::move(fields));
  }
  void warn(std::string_view event, nlohmann::json fields = nlohmann::json::object()) {
    log(LogLevel::kWarn, event, std::move(fields));
  }

 private:
  LogLevel level_;
  std::mutex mu_;
};

}  // namespace scar::interface
