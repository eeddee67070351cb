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
#include <string>
#include <string_view>
#include <vector>

#include "scar/error.hpp"
#include "scar/game/partition.hpp"
#include "scar/segmentation/bracketed_tree.hpp"
#include "scar/segmentation/token_sequence.hpp"

namespace scar::segmentation {

enum class Granularity { kToken, kSpan, kSentence };

inline std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kToken: return "token";
    case Granularity::kSpan: return "span";
    case Granularity::kSentence: return "sentence";
  }
  return "unknown";
}

inline Granularity granularity_from_string(std::string_view s) {
  if (s == "token") return Granularity::kToken;
  if (s == "span") return Granularity::kSpan;
  if (s == "sentence") return Granularity::kSentence;
  fail(ErrorKind::kInvalidArgument, "unknown granularity '" + std::string(s) + "'");
}

// One player: a contiguous run of tokens. Ranges are half-open.
struct UnitSpan {
  std::size_t unit_id = 0;
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
  // 1-based timestep at which the unit's last token is emitted.
  std::size_t completion_timestep = 0;

  friend bool operator==(const UnitSpan&, const UnitSpan&) = default;
};

struct SegmentationResult {
  std::vector<UnitSpan> units;
  game::PartitionTree hierarchy;
  Granularity granularity = Granularity::kToken;
  // Joined text of the underlying token sequence.
  std::string text;
  std::size_t n_tokens = 0;

  std::size_t size() const noexcept { return units.size(); }

  // Verbatim bytes of the unit, including any leading separator.
  std::string_view unit_text(std::size_t i) const {
    const auto& u = units.at(i);
    return std::string_view(text).substr(u.char_begin, u.char_end - u.char_begin);
  }

  // Unit bytes after its leading whitespace: the part masking replaces.
  std::size_t content_begin(std::size_t i) const {
    const auto& u = units.at(i);
    std::size_t c = u.char_begin;
    while (c < u.char_end && is_space(text[c])) ++c;
    return c;
  }
};

namespace detail {

inline UnitSpan make_unit(const TokenSequence& seq, std::size_t id, std::size_t begin,
                          std::size_t end) {
  return UnitSpan{id, begin, end, seq.offset(begin), seq.offset(end), end};
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool ends_with_terminator(std::string_view s) {
  s = trim(s);
  // Closing quotes and brackets may follow the terminator: 'he left."'
  for (bool stripped = true; stripped && !s.empty();) {
    stripped = false;
    for (std::string_view close : {"\"", "'", ")", "]", "\xE2\x80\x9D", "\xE2\x80\x99"}) {
      if (s.size() > close.size() && ends_with(s, close)) {
        s.remove_suffix(close.size());
        stripped = true;
      }
    }
  }
  return ends_with(s, ".") || ends_with(s, "!") || ends_with(s, "?") ||
         ends_with(s, "\xE2\x80\xA6");  // U+2026 horizontal ellipsis
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline bool opens_quote(std::string_view s) {
  return starts_with(s, "\"") || starts_with(s, "'") ||
         starts_with(s, "\xE2\x80\x9C") ||  // left double quotation mark
         starts_with(s, "\xE2\x80\x98");    // left single quotation mark
}

// A sentence may start at `next`: whitespace followed by a capital letter, or
// an opening quote (leading whitespace optional).
inline bool opens_sentence(std::string_view next) {
  const std::string_view body = trim_left(next);
  if (opens_quote(body)) return true;
  const bool had_space = body.size() < next.size();
  return had_space && !body.empty() && body.front() >= 'A' && body.front() <= 'Z';
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string_view first_word(std::string_view s) {
  s = trim_left(s);
  std::size_t n = 0;
  while (n < s.size() && !is_space(s[n])) ++n;
  return s.substr(0, n);
}

// Strength of the boundary in front of unit k (between k-1 and k).
inline int boundary_priority(const std::vector<std::string_view>& unit_text, std::size_t k) {
  const std::string_view left = trim(unit_text[k - 1]);
  if (ends_with_terminator(left)) return 4;
  if (ends_with(left, ";") || ends_with(left, ":")) return 3;
  if (ends_with(left, ",")) return 2;
  const std::string w = lower(first_word(unit_text[k]));
  if (w == "and" || w == "or" || w == "but") return 1;
  return 0;
}

inline game::PartitionTree split_range(const std::vector<std::string_view>& unit_text,
                                       std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return game::PartitionTree::leaf(lo);
  const double mid = 0.5 * static_cast<double>(lo + hi);
  int best_priority = 0;
  std::size_t best = lo + (hi - lo) / 2;
  double best_dist = 0.0;
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const int p = boundary_priority(unit_text, k);
    if (p == 0) continue;
    const double dist = std::abs(static_cast<double>(k) - mid);
    if (p > best_priority || (p == best_priority && dist < best_dist)) {
      best_priority = p;
      best = k;
      best_dist = dist;
    }
  }
  return game::PartitionTree::join(split_range(unit_text, lo, best),
                                   split_range(unit_text, best, hi));
}

inline void require_non_empty(const TokenSequence& seq) {
  require(!seq.empty(), ErrorKind::kEmptyInput, "token sequence is empty");
}

}  // namespace detail

// Binary hierarchy by recursive splitting at the strongest delimiter:
// sentence terminator > semicolon/colon > comma > leading and/or/but >
// midpoint. Among equally strong delimiters the one nearest the midpoint
// wins, leftmost on ties.
inline game::PartitionTree heuristic_hierarchy(const std::vector<UnitSpan>& units,
                                               const TokenSequence& seq) {
  require(!units.empty(), ErrorKind::kEmptyInput, "heuristic_hierarchy needs a unit");
  std::vector<std::string_view> text;
  text.reserve(units.size());
  for (const auto& u : units) {
    text.push_back(std::string_view(seq.text()).substr(u.char_begin, u.char_end - u.char_begin));
  }
  return detail::split_range(text, 0, units.size());
}

inline SegmentationResult segment_tokens(const TokenSequence& seq) {
  detail::require_non_empty(seq);
  SegmentationResult out;
  out.granularity = Granularity::kToken;
  out.text = seq.text();
  out.n_tokens = seq.size();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.units.push_back(detail::make_unit(seq, i, i, i + 1));
  }
  out.hierarchy = heuristic_hierarchy(out.units, seq);
  return out;
}

// A sentence ends after a token ending in . ! ? or an ellipsis, provided the
// next token opens a sentence (see opens_sentence) or the sequence ends.
inline SegmentationResult segment_sentences(const TokenSequence& seq) {
  detail::require_non_empty(seq);
  SegmentationResult out;
  out.granularity = Granularity::kSentence;
  out.text = seq.text();
  out.n_tokens = seq.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const bool last = i + 1 == seq.size();
    const bool boundary =
        last || (detail::ends_with_terminator(seq.surface(i)) &&
                 detail::opens_sentence(seq.surface(i + 1)));
    if (boundary) {
      out.units.push_back(detail::make_unit(seq, out.units.size(), start, i + 1));
      start = i + 1;
    }
  }
  out.hierarchy = game::PartitionTree::balanced(0, out.units.size());
  return out;
}

struct SpanOptions {
  // Largest constituent (in tokens) kept whole as a single player.
  std::size_t max_span_tokens = 8;
};

namespace detail {

inline game::PartitionTree cut_constituents(const ParseNode& node, const TokenSequence& seq,
                                            std::size_t max_tokens, std::size_t& cursor,
                                            std::vector<UnitSpan>& units) {
  if (node.leaf_count <= max_tokens) {
    const std::size_t id = units.size();
    units.push_back(make_unit(seq, id, cursor, cursor + node.leaf_count));
    cursor += node.leaf_count;
    return game::PartitionTree::leaf(id);
  }
  // Left-leaning binarization: (((c1 c2) c3) ... ck).
  game::PartitionTree acc =
      cut_constituents(node.children.front(), seq, max_tokens, cursor, units);
  for (std::size_t k = 1; k < node.children.size(); ++k) {
    acc = game::PartitionTree::join(
        acc, cut_constituents(node.children[k], seq, max_tokens, cursor, units));
  }
  return acc;
}

}  // namespace detail

// Players are the maximal constituents with at most max_span_tokens leaves,
// chosen top-down. The hierarchy is the parse tree above those constituents.
inline SegmentationResult segment_spans_from_tree(const TokenSequence& seq,
                                                  std::string_view bracketed,
                                                  const SpanOptions& options = {}) {
  detail::require_non_empty(seq);
  require(options.max_span_tokens >= 1, ErrorKind::kInvalidArgument,
          "max_span_tokens must be at least 1");
  const ParseNode root = parse_bracketed(bracketed);
  const auto leaves = tree_leaves(root);
  const std::size_t common = std::min(leaves.size(), seq.size());
  for (std::size_t i = 0; i <= common; ++i) {
    const bool leaves_done = i == leaves.size();
    const bool tokens_done = i == seq.size();
    if (leaves_done && tokens_done) break;
    if (leaves_done || tokens_done || leaves[i] != seq.content(i)) {
      std::string detail_msg;
      if (leaves_done) {
        detail_msg = "tree ends but token '" + std::string(seq.content(i)) + "' remains";
      } else if (tokens_done) {
        detail_msg = "tree leaf '" + leaves[i] + "' has no token";
      } else {
        detail_msg = "tree leaf '" + leaves[i] + "' vs token '" + std::string(seq.content(i)) + "'";
      }
      fail(ErrorKind::kAlignment,
           "tree leaves diverge from tokens at leaf " + std::to_string(i + 1) + ": " + detail_msg);
    }
  }

  SegmentationResult out;
  out.granularity = Granularity::kSpan;
  out.text = seq.text();
  out.n_tokens = seq.size();
  std::size_t cursor = 0;
  out.hierarchy =
      detail::cut_constituents(root, seq, options.max_span_tokens, cursor, out.units);
  return out;
}

inline std::vector<std::size_t> completion_timesteps(const SegmentationResult& seg) {
  std::vector<std::size_t> t;
  t.reserve(seg.units.size());
  for (const auto& u : seg.units) t.push_back(u.completion_timestep);
  return t;
}

// Throws kStructure if the units do not tile the tokens in order or the
// hierarchy is not an exact binary cover of the unit indices.
inline void validate(const SegmentationResult& seg) {
  require(!seg.units.empty(), ErrorKind::kStructure, "segmentation has no units");
  std::size_t token = 0;
  std::size_t chr = 0;
  for (std::size_t i = 0; i < seg.units.size(); ++i) {
    const auto& u = seg.units[i];
    require(u.unit_id == i, ErrorKind::kStructure, "unit ids are not 0..N-1 in order");
    require(u.token_begin == token && u.token_end > u.token_begin, ErrorKind::kStructure,
            "unit " + std::to_string(i) + " does not continue the token tiling");
    require(u.char_begin == chr && u.char_end >= u.char_begin, ErrorKind::kStructure,
            "unit " + std::to_string(i) + " does not continue the character tiling");
    require(u.completion_timestep == u.token_end, ErrorKind::kStructure,
            "unit " + std::to_string(i) + " completion timestep is not its last token");
    token = u.token_end;
    chr = u.char_end;
  }
  require(token == seg.n_tokens, ErrorKind::kStructure, "units do not cover every token");
  require(chr == seg.text.size(), ErrorKind::kStructure, "units do not cover the text");
  seg.hierarchy.validate(seg.units.size());
}

}  // namespace scar::segmentation
