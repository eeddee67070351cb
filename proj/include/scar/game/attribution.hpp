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

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "scar/error.hpp"

namespace scar::game {

enum class Method { kExact, kSampled, kOwenTwoLevel, kOwenHierarchical };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kExact: return "exact";
    case Method::kSampled: return "sampled";
    case Method::kOwenTwoLevel: return "owen_two_level";
    case Method::kOwenHierarchical: return "owen_hierarchical";
  }
  return "unknown";
}

inline Method method_from_string(std::string_view s) {
  if (s == "exact") return Method::kExact;
  if (s == "sampled") return Method::kSampled;
  if (s == "owen_two_level") return Method::kOwenTwoLevel;
  if (s == "owen_hierarchical") return Method::kOwenHierarchical;
  fail(ErrorKind::kInvalidArgument, "unknown attribution method '" + std::string(s) + "'");
}

// Per-player signed credit plus solver metadata.
struct AttributionVector {
  std::vector<double> values;
  Method method = Method::kExact;
  // Distinct coalitions the solver asked the oracle for. Independent of memo
  // state, so repeated runs report the same count.
  std::size_t evals_used = 0;
  // Standard error of each value; sampled method only.
  std::optional<std::vector<double>> stderr_values;

  std::size_t size() const noexcept { return values.size(); }

  double sum() const noexcept {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

// The tolerance used for every efficiency/axiom check: 1e-9 scaled by the
// magnitude of the grand-coalition value.
inline double scaled_tolerance(double grand_value, double abs_tol = 1e-9) {
  const double mag = grand_value < 0 ? -grand_value : grand_value;
  return abs_tol * (mag > 1.0 ? mag : 1.0);
}

}  // namespace scar::game
