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

#include <stdexcept>
#include <string>
#include <string_view>

namespace scar {

// Every failure raised by the library carries one of these kinds. The CLI and
// the service map kinds onto exit codes / HTTP statuses (see ErrorCategory).
enum class ErrorKind {
  kInvalidArgument,
  kPrecondition,
  kCapacity,
  kPartition,
  kStructure,
  kEmptyInput,
  kAlignment,
  kParse,
  kOracle,
  kTransport,
  kHttpStatus,
  kMalformedBody,
  kLengthMismatch,
  kTimeout,
};

enum class ErrorCategory { kValidation, kSemantic, kUpstream };

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kPartition: return "partition";
    case ErrorKind::kStructure: return "structure";
    case ErrorKind::kEmptyInput: return "empty_input";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kOracle: return "oracle";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kHttpStatus: return "http_status";
    case ErrorKind::kMalformedBody: return "malformed_body";
    case ErrorKind::kLengthMismatch: return "length_mismatch";
    case ErrorKind::kTimeout: return "timeout";
  }
  return "unknown";
}

inline ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return ErrorCategory::kValidation;
    case ErrorKind::kOracle:
    case ErrorKind::kTransport:
    case ErrorKind::kHttpStatus:
    case ErrorKind::kMalformedBody:
    case ErrorKind::kLengthMismatch:
    case ErrorKind::kTimeout:
      return ErrorCategory::kUpstream;
    default:
      return ErrorCategory::kSemantic;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

  // Transport-level failures may succeed when retried; protocol violations
  // (bad body, wrong length) will not.
  bool retryable() const noexcept {
    return kind_ == ErrorKind::kTransport || kind_ == ErrorKind::kTimeout;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace scar
