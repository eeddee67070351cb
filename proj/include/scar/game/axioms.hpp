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
#include <string>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/attribution.hpp"
#include "scar/game/characteristic.hpp"
#include "scar/random.hpp"

namespace scar::game {

struct AxiomReport {
  struct NullCheck {
    std::size_t player = 0;
    double value = 0.0;
    bool pass = false;
  };
  struct SymmetryCheck {
    std::size_t a = 0;
    std::size_t b = 0;
    double difference = 0.0;
    bool pass = false;
  };

  double grand_value = 0.0;
  double empty_value = 0.0;
  double efficiency_residual = 0.0;
  double tolerance = 0.0;
  bool efficiency_pass = false;
  std::vector<NullCheck> null_players;
  std::vector<SymmetryCheck> symmetric_pairs;
  // True for sampled attributions: tolerances are widened to 3 standard errors.
  bool advisory = false;
  // True when null/symmetry detection enumerated every coalition.
  bool exhaustive = false;

  bool all_pass() const {
    if (!efficiency_pass) return false;
    for (const auto& c : null_players) {
      if (!c.pass) return false;
    }
    for (const auto& c : symmetric_pairs) {
      if (!c.pass) return false;
    }
    return true;
  }
};

struct AxiomOptions {
  // Detection enumerates all coalitions up to this many players.
  std::size_t exhaustive_up_to = 10;
};

// Checks efficiency exactly, and null-player / symmetry on the players the
// probes identify. Detection is by probing coalitions (random ones plus the
// empty and the largest relevant coalition), or exhaustive for small games.
inline AxiomReport verify_axioms(const CharacteristicOracle& oracle,
                                 const AttributionVector& attribution, std::size_t probes,
                                 std::uint64_t seed, const AxiomOptions& options = {}) {
  const std::size_t n = oracle.n_players();
  require(attribution.size() == n, ErrorKind::kInvalidArgument,
          "attribution has " + std::to_string(attribution.size()) + " values, oracle has " +
              std::to_string(n) + " players");

  AxiomReport report;
  report.grand_value = oracle.evaluate(Coalition::grand(n));
  report.empty_value = oracle.evaluate(Coalition::empty(n));
  report.tolerance = scaled_tolerance(report.grand_value);
  report.efficiency_residual =
      std::abs(attribution.sum() - (report.grand_value - report.empty_value));
  report.advisory = attribution.method == Method::kSampled;
  report.exhaustive = n <= options.exhaustive_up_to && n < 63;

  const std::vector<double>* se =
      attribution.stderr_values ? &*attribution.stderr_values : nullptr;
  auto stderr_of = [&](std::size_t i) { return se ? (*se)[i] : 0.0; };

  double eff_tol = report.tolerance;
  if (report.advisory && se) {
    double var = 0.0;
    for (double s : *se) var += s * s;
    eff_tol = std::max(eff_tol, 3.0 * std::sqrt(var));
  }
  report.efficiency_pass = report.efficiency_residual <= eff_tol;

  // Coalitions used for detection: every subset, or random probes plus the
  // empty and grand coalition. Callers strip the players under test.
  std::vector<Coalition> base;
  if (report.exhaustive) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      base.push_back(Coalition::from_mask(n, mask));
    }
  } else {
    Rng rng(seed);
    base.push_back(Coalition::empty(n));
    base.push_back(Coalition::grand(n));
    for (std::size_t k = 0; k < probes; ++k) {
      Coalition c = Coalition::empty(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (rng() & 1u) c.insert(i);
      }
      base.push_back(std::move(c));
    }
  }

  const double detect_tol = report.tolerance;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Coalition> req;
    for (const auto& s : base) {
      if (s.contains(i)) continue;
      req.push_back(s);
      req.push_back(s.with(i));
    }
    if (!report.exhaustive) {
      const Coalition rest = Coalition::grand(n).without(i);
      req.push_back(rest);
      req.push_back(rest.with(i));
    }
    const auto v = oracle.evaluate_batch(req);
    bool is_null = true;
    for (std::size_t k = 0; k + 1 < v.size() && is_null; k += 2) {
      if (std::abs(v[k + 1] - v[k]) > detect_tol) is_null = false;
    }
    if (!is_null) continue;
    const double tol = std::max(report.tolerance, 3.0 * stderr_of(i));
    report.null_players.push_back({i, attribution.values[i], std::abs(attribution.values[i]) <= tol});
  }

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<Coalition> req;
      for (const auto& s : base) {
        if (s.contains(a) || s.contains(b)) continue;
        req.push_back(s.with(a));
        req.push_back(s.with(b));
      }
      if (!report.exhaustive) {
        const Coalition rest = Coalition::grand(n).without(a).without(b);
        req.push_back(rest.with(a));
        req.push_back(rest.with(b));
      }
      const auto v = oracle.evaluate_batch(req);
      bool symmetric = true;
      for (std::size_t k = 0; k + 1 < v.size() && symmetric; k += 2) {
        if (std::abs(v[k + 1] - v[k]) > detect_tol) symmetric = false;
      }
      if (!symmetric) continue;
      const double diff = std::abs(attribution.values[a] - attribution.values[b]);
      const double sa = stderr_of(a), sb = stderr_of(b);
      const double tol = std::max(report.tolerance, 3.0 * std::sqrt(sa * sa + sb * sb));
      report.symmetric_pairs.push_back({a, b, diff, diff <= tol});
    }
  }
  return report;
}

}  // namespace scar::game
