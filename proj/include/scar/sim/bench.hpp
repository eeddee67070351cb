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
#include <future>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "scar/error.hpp"
#include "scar/sim/env.hpp"
#include "scar/sim/policy.hpp"
#include "scar/sim/train.hpp"

namespace scar::sim {

struct BenchConfig {
  std::vector<Scheme> schemes;
  std::vector<std::uint64_t> seeds;
  // Everything but scheme and seed is taken from here.
  TrainConfig base;
  double threshold_fraction = 0.9;
  // Concurrent (scheme, seed) cells; 0 means hardware concurrency.
  std::size_t threads = 0;
};

struct SchemeSummary {
  std::string name;
  Scheme scheme = Scheme::kSparse;
  std::vector<RunLog> runs;
  std::vector<std::optional<std::size_t>> episodes_to_threshold;
  // Median over seeds; a run that never reaches the threshold counts as
  // infinitely slow, so the median is empty when half the runs miss.
  std::optional<double> median_episodes_to_threshold;
  std::optional<double> q1_episodes_to_threshold;
  std::optional<double> q3_episodes_to_threshold;
  double median_final_moving_avg = 0.0;
  double q1_final_moving_avg = 0.0;
  double q3_final_moving_avg = 0.0;
  std::size_t oracle_evals_total = 0;
  double max_return_residual = 0.0;
  double max_conservation_residual = 0.0;
  double mean_final_kl = 0.0;
};

struct BenchReport {
  double max_reward = 0.0;
  double threshold_fraction = 0.9;
  std::size_t episodes = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<SchemeSummary> schemes;

  std::size_t row_count() const {
    std::size_t n = 0;
    for (const auto& s : schemes) {
      for (const auto& r : s.runs) n += r.episodes();
    }
    return n;
  }
};

// Linear-interpolation quantile of sorted data; +inf entries are allowed.
inline double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), ErrorKind::kInvalidArgument, "quantile of empty data");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi || std::isinf(xs[hi]) || std::isinf(xs[lo])) {
    return pos - static_cast<double>(lo) < 0.5 ? xs[lo] : xs[hi];
  }
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline std::optional<double> finite_or_none(double x) {
  if (std::isinf(x)) return std::nullopt;
  return x;
}

inline void summarize(SchemeSummary& s, double fraction) {
  std::vector<double> ett;
  std::vector<double> final_ma;
  double kl = 0.0;
  for (const auto& run : s.runs) {
    const auto e = episodes_to_threshold(run, fraction);
    s.episodes_to_threshold.push_back(e);
    ett.push_back(e ? static_cast<double>(*e) : std::numeric_limits<double>::infinity());
    final_ma.push_back(run.moving_avg.empty() ? 0.0 : run.moving_avg.back());
    for (std::size_t k : run.oracle_evals) s.oracle_evals_total += k;
    s.max_return_residual = std::max(s.max_return_residual, run.max_return_residual);
    s.max_conservation_residual = std::max(s.max_conservation_residual, run.max_conservation_residual);
    kl += run.kl.empty() ? 0.0 : run.kl.back();
  }
  s.median_episodes_to_threshold = finite_or_none(quantile(ett, 0.5));
  s.q1_episodes_to_threshold = finite_or_none(quantile(ett, 0.25));
  s.q3_episodes_to_threshold = finite_or_none(quantile(ett, 0.75));
  s.median_final_moving_avg = quantile(final_ma, 0.5);
  s.q1_final_moving_avg = quantile(final_ma, 0.25);
  s.q3_final_moving_avg = quantile(final_ma, 0.75);
  s.mean_final_kl = s.runs.empty() ? 0.0 : kl / static_cast<double>(s.runs.size());
}

// Trains every (scheme, seed) cell from a uniform initial policy and
// aggregates convergence statistics per scheme. Cells are independent and run
// concurrently; results do not depend on the thread count.
inline BenchReport compare_schemes(const Env& env, const BenchConfig& cfg) {
  require(cfg.schemes.size() >= 2, ErrorKind::kInvalidArgument,
          "compare_schemes needs at least 2 schemes");
  require(cfg.seeds.size() >= 3, ErrorKind::kInvalidArgument,
          "compare_schemes needs at least 3 seeds");
  cfg.base.validate();

  BenchReport report;
  report.max_reward = env.max_reward();
  report.threshold_fraction = cfg.threshold_fraction;
  report.episodes = cfg.base.episodes;
  report.seeds = cfg.seeds;

  struct Cell {
    std::size_t scheme_index;
    TrainConfig config;
  };
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < cfg.schemes.size(); ++k) {
    SchemeSummary s;
    s.scheme = cfg.schemes[k];
    s.name = std::string(to_string(cfg.schemes[k]));
    std::size_t dup = 0;
    for (std::size_t j = 0; j < k; ++j) dup += cfg.schemes[j] == cfg.schemes[k] ? 1 : 0;
    if (dup > 0) s.name += "#" + std::to_string(dup + 1);
    s.runs.resize(cfg.seeds.size());
    report.schemes.push_back(std::move(s));
    for (std::uint64_t seed : cfg.seeds) {
      TrainConfig c = cfg.base;
      c.scheme = cfg.schemes[k];
      c.seed = seed;
      cells.push_back({k, c});
    }
  }

  auto run_cell = [&env](const TrainConfig& c) {
    PolicyTable policy = PolicyTable::uniform(env, c.order);
    return train(policy, env, c);
  };

  const std::size_t threads =
      cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunLog> logs(cells.size());
  for (std::size_t first = 0; first < cells.size(); first += threads) {
    const std::size_t last = std::min(cells.size(), first + threads);
    std::vector<std::future<RunLog>> wave;
    for (std::size_t i = first; i < last; ++i) {
      wave.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async,
                                run_cell, cells[i].config));
    }
    for (std::size_t i = first; i < last; ++i) logs[i] = wave[i - first].get();
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& s = report.schemes[cells[i].scheme_index];
    const std::size_t seed_pos = i % cfg.seeds.size();
    logs[i].scheme = s.name;
    s.runs[seed_pos] = std::move(logs[i]);
  }
  for (auto& s : report.schemes) summarize(s, cfg.threshold_fraction);
  return report;
}

inline constexpr std::string_view kCsvHeader =
    "scheme,seed,episode,terminal_reward,moving_avg,oracle_evals,kl";

inline void write_csv(const BenchReport& report, std::ostream& out) {
  out << kCsvHeader << '\n';
  out << std::setprecision(10);
  for (const auto& s : report.schemes) {
    for (const auto& run : s.runs) {
      for (std::size_t e = 0; e < run.episodes(); ++e) {
        out << s.name << ',' << run.seed << ',' << e + 1 << ',' << run.terminal_reward[e] << ','
            << run.moving_avg[e] << ',' << run.oracle_evals[e] << ',' << run.kl[e] << '\n';
      }
    }
  }
}

inline nlohmann::json summary_json(const BenchReport& report) {
  auto opt = [](const std::optional<double>& x) -> nlohmann::json {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["max_reward"] = report.max_reward;
  j["threshold_fraction"] = report.threshold_fraction;
  j["episodes"] = report.episodes;
  j["seeds"] = report.seeds;
  j["schemes"] = nlohmann::json::array();
  for (const auto& s : report.schemes) {
    nlohmann::json e;
    e["scheme"] = s.name;
    e["episodes_to_threshold"] = nlohmann::json::array();
    for (const auto& x : s.episodes_to_threshold) {
      e["episodes_to_threshold"].push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
    }
    e["median_episodes_to_threshold"] = opt(s.median_episodes_to_threshold);
    e["iqr_episodes_to_threshold"] = {opt(s.q1_episodes_to_threshold), opt(s.q3_episodes_to_threshold)};
    e["median_final_moving_avg"] = s.median_final_moving_avg;
    e["iqr_final_moving_avg"] = {s.q1_final_moving_avg, s.q3_final_moving_avg};
    e["oracle_evals_total"] = s.oracle_evals_total;
    e["max_return_residual"] = s.max_return_residual;
    e["max_conservation_residual"] = s.max_conservation_residual;
    e["mean_final_kl"] = s.mean_final_kl;
    j["schemes"].push_back(std::move(e));
  }
  return j;
}

// Median-over-seeds moving-average reward per scheme as a standalone SVG line
// chart, with the convergence threshold drawn dashed.
inline std::string render_svg(const BenchReport& report) {
  constexpr double kW = 720, kH = 420, kLeft = 60, kRight = 160, kTop = 30, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const std::size_t n_ep = report.episodes;

  std::vector<std::vector<double>> curves;
  double lo = std::min(0.0, report.threshold_fraction * report.max_reward);
  double hi = report.max_reward;
  for (const auto& s : report.schemes) {
    std::vector<double> curve(n_ep, 0.0);
    for (std::size_t e = 0; e < n_ep; ++e) {
      std::vector<double> xs;
      for (const auto& run : s.runs) {
        if (e < run.moving_avg.size()) xs.push_back(run.moving_avg[e]);
      }
      curve[e] = xs.empty() ? 0.0 : quantile(xs, 0.5);
      lo = std::min(lo, curve[e]);
      hi = std::max(hi, curve[e]);
    }
    curves.push_back(std::move(curve));
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  auto px = [&](double e) { return kLeft + (n_ep > 1 ? e / double(n_ep - 1) : 0.0) * plot_w; };
  auto py = [&](double v) { return kTop + (1.0 - (v - lo) / (hi - lo)) * plot_h; };

  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kLeft << "\" y=\"18\" font-size=\"14\">Moving-average terminal reward "
       "(median over seeds)</text>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
    << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v
      << "</text>\n";
    const double e = (n_ep > 1 ? double(n_ep - 1) : 0.0) * k / 4.0;
    o << "<text x=\"" << px(e) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
      << static_cast<long>(e + 1) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\">episode</text>\n";
  const double thr = report.threshold_fraction * report.max_reward;
  o << "<line x1=\"" << kLeft << "\" y1=\"" << py(thr) << "\" x2=\"" << kLeft + plot_w
    << "\" y2=\"" << py(thr) << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    // Thin to at most ~600 vertices.
    const std::size_t step = std::max<std::size_t>(1, n_ep / 600);
    for (std::size_t e = 0; e < n_ep; e += step) o << px(double(e)) << ',' << py(curves[k][e]) << ' ';
    if (n_ep > 0) o << px(double(n_ep - 1)) << ',' << py(curves[k][n_ep - 1]);
    o << "\"/>\n";
    const double ly = kTop + 16.0 * double(k + 1);
    o << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kW - kRight + 30
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kW - kRight + 36 << "\" y=\"" << ly << "\">" << report.schemes[k].name
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace scar::sim
