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
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scar/error.hpp"
#include "scar/game/exact.hpp"
#include "scar/game/owen.hpp"
#include "scar/game/sampled.hpp"
#include "scar/oracle/characteristic.hpp"
#include "scar/oracle/lexicon.hpp"
#include "scar/oracle/remote.hpp"
#include "scar/segmentation/segment.hpp"
#include "scar/shaping/shaping.hpp"
#include "scar/sim/bench.hpp"

// JSON request/response handling shared by the CLI and the HTTP service. Both
// front ends call the functions here, so identical requests yield identical
// bodies apart from the "timing" object.
namespace scar::interface {

using nlohmann::json;

enum class AttributionMethod { kExact, kSampled, kOwen };

inline AttributionMethod attribution_method_from_string(std::string_view s) {
  if (s == "exact") return AttributionMethod::kExact;
  if (s == "sampled") return AttributionMethod::kSampled;
  if (s == "owen") return AttributionMethod::kOwen;
  fail(ErrorKind::kInvalidArgument, "unknown method '" + std::string(s) + "' (exact|sampled|owen)");
}

inline std::string_view to_string(AttributionMethod m) {
  switch (m) {
    case AttributionMethod::kExact: return "exact";
    case AttributionMethod::kSampled: return "sampled";
    case AttributionMethod::kOwen: return "owen";
  }
  return "unknown";
}

struct OracleSelector {
  // Exactly one of the two is set.
  std::optional<json> lexicon;
  std::optional<std::string> remote_url;
  long timeout_ms = 10000;
};

struct AttributeRequest {
  std::optional<std::string> id;
  std::string prompt;
  std::vector<std::string> tokens;
  bool verbatim_join = false;
  segmentation::Granularity granularity = segmentation::Granularity::kToken;
  std::optional<std::string> tree;
  std::size_t max_span_tokens = 8;
  AttributionMethod method = AttributionMethod::kExact;
  oracle::MaskingMode mask = oracle::MaskingMode::space_fill();
  bool center_baseline = false;
  OracleSelector oracle;
  std::uint64_t seed = 0;
  std::size_t n_permutations = 1000;
  std::size_t batch_size = 32;
};

namespace detail {

inline const json& field(const json& j, const char* name) {
  require(j.contains(name), ErrorKind::kInvalidArgument, std::string("missing field '") + name + "'");
  return j.at(name);
}

inline std::string get_string(const json& j, const char* name) {
  const auto& v = field(j, name);
  require(v.is_string(), ErrorKind::kInvalidArgument, std::string("'") + name + "' must be a string");
  return v.get<std::string>();
}

inline std::uint64_t get_count(const json& j, const char* name) {
  const auto& v = field(j, name);
  require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
          ErrorKind::kInvalidArgument, std::string("'") + name + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline double get_number(const json& j, const char* name) {
  const auto& v = field(j, name);
  require(v.is_number(), ErrorKind::kInvalidArgument, std::string("'") + name + "' must be a number");
  return v.get<double>();
}

inline bool get_bool(const json& j, const char* name) {
  const auto& v = field(j, name);
  require(v.is_boolean(), ErrorKind::kInvalidArgument, std::string("'") + name + "' must be a boolean");
  return v.get<bool>();
}

inline std::vector<double> get_numbers(const json& j, const char* name) {
  const auto& v = field(j, name);
  require(v.is_array(), ErrorKind::kInvalidArgument, std::string("'") + name + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    require(x.is_number(), ErrorKind::kInvalidArgument,
            std::string("'") + name + "' must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

inline OracleSelector parse_oracle_selector(const json& j) {
  require(j.is_object(), ErrorKind::kInvalidArgument, "'oracle' must be an object");
  OracleSelector sel;
  const bool has_lex = j.contains("lexicon");
  const bool has_remote = j.contains("remote");
  require(has_lex != has_remote, ErrorKind::kInvalidArgument,
          "'oracle' needs exactly one of 'lexicon' or 'remote'");
  if (has_lex) {
    require(j["lexicon"].is_object(), ErrorKind::kInvalidArgument, "'oracle.lexicon' must be an object");
    sel.lexicon = j["lexicon"];
  } else {
    sel.remote_url = detail::get_string(j, "remote");
  }
  if (j.contains("timeout_ms")) sel.timeout_ms = static_cast<long>(detail::get_count(j, "timeout_ms"));
  return sel;
}

inline AttributeRequest parse_attribute_request(const json& j) {
  require(j.is_object(), ErrorKind::kInvalidArgument, "request must be a JSON object");
  AttributeRequest r;
  if (j.contains("id")) r.id = detail::get_string(j, "id");
  if (j.contains("prompt")) r.prompt = detail::get_string(j, "prompt");
  const auto& tokens = detail::field(j, "tokens");
  require(tokens.is_array(), ErrorKind::kInvalidArgument, "'tokens' must be an array of strings");
  for (const auto& t : tokens) {
    require(t.is_string(), ErrorKind::kInvalidArgument, "'tokens' must be an array of strings");
    r.tokens.push_back(t.get<std::string>());
  }
  if (j.contains("join")) {
    const auto join = detail::get_string(j, "join");
    require(join == "space" || join == "verbatim", ErrorKind::kInvalidArgument,
            "'join' must be 'space' or 'verbatim'");
    r.verbatim_join = join == "verbatim";
  }
  if (j.contains("granularity")) {
    r.granularity = segmentation::granularity_from_string(detail::get_string(j, "granularity"));
  }
  if (j.contains("tree")) r.tree = detail::get_string(j, "tree");
  if (j.contains("max_span_tokens")) r.max_span_tokens = detail::get_count(j, "max_span_tokens");
  if (j.contains("method")) r.method = attribution_method_from_string(detail::get_string(j, "method"));
  char filler = ' ';
  if (j.contains("filler")) {
    const auto f = detail::get_string(j, "filler");
    require(f.size() == 1, ErrorKind::kInvalidArgument, "'filler' must be a single character");
    filler = f[0];
  }
  r.mask = oracle::masking_from_string(j.contains("mask") ? detail::get_string(j, "mask") : "space_fill",
                                       filler);
  if (j.contains("center_baseline")) r.center_baseline = detail::get_bool(j, "center_baseline");
  if (j.contains("oracle")) r.oracle = parse_oracle_selector(j["oracle"]);
  if (j.contains("seed")) r.seed = detail::get_count(j, "seed");
  if (j.contains("n_permutations")) r.n_permutations = detail::get_count(j, "n_permutations");
  if (j.contains("batch_size")) r.batch_size = detail::get_count(j, "batch_size");
  return r;
}

inline json segmentation_json(const segmentation::SegmentationResult& seg) {
  json j;
  j["granularity"] = std::string(to_string(seg.granularity));
  j["text"] = seg.text;
  j["units"] = json::array();
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const auto& u = seg.units[i];
    j["units"].push_back({{"unit_id", u.unit_id},
                          {"token_range", {u.token_begin, u.token_end}},
                          {"char_range", {u.char_begin, u.char_end}},
                          {"text", std::string(seg.unit_text(i))},
                          {"completion_timestep", u.completion_timestep}});
  }
  j["hierarchy"] = json::parse(seg.hierarchy.to_string());
  return j;
}

inline json attribution_json(const game::AttributionVector& a) {
  json j;
  j["method"] = std::string(game::to_string(a.method));
  j["values"] = a.values;
  j["evals_used"] = a.evals_used;
  if (a.stderr_values) j["stderr"] = *a.stderr_values;
  return j;
}

// Environment variable carrying the bearer token for remote scorers.
inline constexpr const char* kOracleTokenEnv = "SCAR_ORACLE_TOKEN";

inline std::shared_ptr<const oracle::ScoreOracle> make_score_oracle(const OracleSelector& sel,
                                                                   char filler) {
  if (sel.lexicon) {
    return std::make_shared<const oracle::LexiconRM>(oracle::LexiconRM::from_json(*sel.lexicon, filler));
  }
  require(sel.remote_url.has_value(), ErrorKind::kInvalidArgument, "request has no oracle");
  oracle::RemoteOptions opt;
  opt.endpoint = *sel.remote_url;
  opt.timeout = std::chrono::milliseconds(sel.timeout_ms);
  if (const char* tok = std::getenv(kOracleTokenEnv); tok && *tok) opt.auth_token = tok;
  return std::make_shared<const oracle::RemoteScoreClient>(opt);
}

struct AttributeOutcome {
  json body;
  std::size_t evals_used = 0;
  std::size_t score_queries = 0;
};

// Segment, build the characteristic function, solve. `cache` may be null.
inline AttributeOutcome attribute(const AttributeRequest& req,
                                  std::shared_ptr<oracle::ValueCache> cache = nullptr) {
  const auto started = std::chrono::steady_clock::now();
  require(!req.tokens.empty(), ErrorKind::kInvalidArgument, "'tokens' must not be empty");
  require(req.oracle.lexicon || req.oracle.remote_url, ErrorKind::kInvalidArgument,
          "missing field 'oracle'");

  const auto seq = req.verbatim_join ? segmentation::TokenSequence(req.tokens)
                                     : segmentation::TokenSequence::from_words(req.tokens);
  segmentation::SegmentationResult seg;
  switch (req.granularity) {
    case segmentation::Granularity::kToken: seg = segmentation::segment_tokens(seq); break;
    case segmentation::Granularity::kSentence: seg = segmentation::segment_sentences(seq); break;
    case segmentation::Granularity::kSpan:
      require(req.tree.has_value(), ErrorKind::kInvalidArgument,
              "span granularity needs a bracketed 'tree'");
      seg = segmentation::segment_spans_from_tree(seq, *req.tree, {req.max_span_tokens});
      break;
  }

  const auto rm = make_score_oracle(req.oracle, req.mask.filler);
  oracle::CharacteristicOptions copt;
  copt.mode = req.mask;
  copt.center_baseline = req.center_baseline;
  copt.batch_size = req.batch_size;
  copt.max_in_flight = req.oracle.remote_url ? 4 : 1;
  copt.shared_cache = std::move(cache);
  copt.score_queries = std::make_shared<std::atomic<std::size_t>>(0);
  auto v = oracle::characteristic_from_oracle(rm, req.prompt, seg, copt);

  game::AttributionVector a;
  switch (req.method) {
    case AttributionMethod::kExact: a = game::exact_shapley(v); break;
    case AttributionMethod::kSampled: a = game::sampled_shapley(v, req.n_permutations, req.seed); break;
    case AttributionMethod::kOwen: a = game::owen_hierarchical(v, seg.hierarchy); break;
  }
  const double grand = v.evaluate(game::Coalition::grand(seg.size()));
  const double empty = v.evaluate(game::Coalition::empty(seg.size()));

  json body;
  if (req.id) body["id"] = *req.id;
  body["method"] = std::string(to_string(req.method));
  body["granularity"] = std::string(to_string(req.granularity));
  body["mask"] = std::string(oracle::to_string(req.mask.kind));
  body["segmentation"] = segmentation_json(seg);
  body["attribution"] = attribution_json(a);
  body["credits"] = json::array();
  for (std::size_t i = 0; i < seg.size(); ++i) {
    body["credits"].push_back({{"unit_id", i},
                               {"text", std::string(segmentation::trim(seg.unit_text(i)))},
                               {"value", a.values[i]}});
  }
  body["grand_value"] = grand;
  body["empty_value"] = empty;
  body["efficiency_residual"] = std::abs(a.sum() - (grand - empty));
  body["evals_used"] = a.evals_used;
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
  body["timing"] = {{"elapsed_ms", elapsed.count()}};

  return AttributeOutcome{std::move(body), a.evals_used, copt.score_queries->load()};
}

struct ShapeRequest {
  std::size_t horizon = 0;
  shaping::TrajectoryLogProbs logprobs;
  double terminal_reward = 0.0;
  std::vector<double> attribution;
  std::vector<std::size_t> completion_timesteps;
  shaping::ShapingConfig config;
  bool eos = false;
};

inline ShapeRequest parse_shape_request(const json& j) {
  require(j.is_object(), ErrorKind::kInvalidArgument, "trajectory must be a JSON object");
  ShapeRequest r;
  r.horizon = detail::get_count(j, "T");
  r.logprobs.logp_policy = detail::get_numbers(j, "logp_policy");
  r.logprobs.logp_ref = detail::get_numbers(j, "logp_ref");
  r.terminal_reward = detail::get_number(j, "terminal_reward");
  r.attribution = detail::get_numbers(j, "attribution");
  for (double t : detail::get_numbers(j, "completion_timesteps")) {
    require(t >= 1 && t == static_cast<double>(static_cast<std::size_t>(t)), ErrorKind::kInvalidArgument,
            "'completion_timesteps' must hold positive integers");
    r.completion_timesteps.push_back(static_cast<std::size_t>(t));
  }
  r.config.alpha = j.contains("alpha") ? detail::get_number(j, "alpha") : shaping::ShapingConfig::kDefaultAlpha;
  r.config.beta = j.contains("beta") ? detail::get_number(j, "beta") : 0.0;
  if (j.contains("eos")) r.eos = detail::get_bool(j, "eos");
  return r;
}

inline json shape(const ShapeRequest& r) {
  r.config.validate();
  require(r.logprobs.logp_policy.size() == r.horizon, ErrorKind::kInvalidArgument,
          "'T' is " + std::to_string(r.horizon) + " but logp_policy has " +
              std::to_string(r.logprobs.logp_policy.size()) + " entries");
  const auto r_kl = shaping::kl_penalty(r.logprobs, r.config.beta);
  const auto r_shap =
      shaping::place_shap_rewards(r.attribution, r.completion_timesteps, r.horizon, r.eos);
  const auto traj = shaping::combine(r_kl, r_shap, r.terminal_reward, r.config.alpha);
  json out;
  out["r_total"] = traj.r_total;
  out["r_kl"] = traj.r_kl;
  out["r_shap"] = traj.r_shap;
  out["return_residual"] = shaping::verify_return_equality(traj);
  return out;
}

// simulate --config file: training hyperparameters and the scheme grid.
inline sim::BenchConfig parse_bench_config(const json& j) {
  require(j.is_object(), ErrorKind::kInvalidArgument, "config must be a JSON object");
  sim::BenchConfig cfg;
  for (const auto& s : detail::field(j, "schemes")) {
    require(s.is_string(), ErrorKind::kInvalidArgument, "'schemes' must hold strings");
    cfg.schemes.push_back(sim::scheme_from_string(s.get<std::string>()));
  }
  if (j.contains("seeds")) {
    const auto& seeds = j["seeds"];
    if (seeds.is_array()) {
      for (const auto& s : seeds) {
        require(s.is_number_unsigned(), ErrorKind::kInvalidArgument, "'seeds' must hold non-negative integers");
        cfg.seeds.push_back(s.get<std::uint64_t>());
      }
    } else {
      const auto n = detail::get_count(j, "seeds");
      for (std::uint64_t s = 1; s <= n; ++s) cfg.seeds.push_back(s);
    }
  }
  auto& b = cfg.base;
  if (j.contains("alpha")) b.alpha = detail::get_number(j, "alpha");
  if (j.contains("beta")) b.beta = detail::get_number(j, "beta");
  if (j.contains("learning_rate")) b.learning_rate = detail::get_number(j, "learning_rate");
  if (j.contains("episodes")) b.episodes = detail::get_count(j, "episodes");
  if (j.contains("eval_every")) b.eval_every = detail::get_count(j, "eval_every");
  if (j.contains("granularity")) {
    b.granularity = segmentation::granularity_from_string(detail::get_string(j, "granularity"));
  }
  if (j.contains("sharpness")) b.sharpness = detail::get_number(j, "sharpness");
  if (j.contains("baseline")) b.baseline = detail::get_bool(j, "baseline");
  if (j.contains("policy_order")) {
    const auto o = detail::get_string(j, "policy_order");
    require(o == "positional" || o == "previous_token", ErrorKind::kInvalidArgument,
            "'policy_order' must be 'positional' or 'previous_token'");
    b.order = o == "positional" ? sim::PolicyOrder::kPositional : sim::PolicyOrder::kPreviousToken;
  }
  if (j.contains("threshold_fraction")) cfg.threshold_fraction = detail::get_number(j, "threshold_fraction");
  if (j.contains("threads")) cfg.threads = detail::get_count(j, "threads");
  return cfg;
}

// Parse a request document; syntax errors are validation failures.
inline json parse_document(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  require(!j.is_discarded(), ErrorKind::kInvalidArgument, "malformed JSON");
  return j;
}

inline json error_json(const Error& e) {
  return json{{"error", e.what()}, {"kind", std::string(to_string(e.kind()))}};
}

}  // namespace scar::interface
