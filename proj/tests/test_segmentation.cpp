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

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "scar/error.hpp"
#include "scar/segmentation/bracketed_tree.hpp"
#include "scar/segmentation/segment.hpp"

namespace {

using scar::Error;
using scar::ErrorKind;
using namespace scar::segmentation;

using Steps = std::vector<std::size_t>;

ErrorKind kind_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "no scar::Error raised";
  return ErrorKind::kInvalidArgument;
}

TEST(TokenSequence, OffsetsReconstructText) {
  const auto seq = TokenSequence::from_words({"a", "bc", " d"});
  EXPECT_EQ(seq.text(), "a bc d");
  EXPECT_EQ(seq.offset(0), 0u);
  EXPECT_EQ(seq.offset(1), 1u);
  EXPECT_EQ(seq.offset(2), 4u);
  EXPECT_EQ(seq.offset(3), 6u);
  EXPECT_EQ(seq.content(1), "bc");
  EXPECT_EQ(kind_of([] { TokenSequence({"a", ""}); }), ErrorKind::kInvalidArgument);
}

TEST(SegmentTokens, IdentitySegmentation) {
  const auto seg = segment_tokens(TokenSequence::from_words({"a", "b", "c"}));
  EXPECT_EQ(seg.size(), 3u);
  EXPECT_EQ(completion_timesteps(seg), (Steps{1, 2, 3}));
  const auto one = segment_tokens(TokenSequence::from_words({"hi"}));
  EXPECT_EQ(completion_timesteps(one), (Steps{1}));
  EXPECT_EQ(one.hierarchy.to_string(), "0");
  EXPECT_EQ(kind_of([] { segment_tokens(TokenSequence{}); }), ErrorKind::kEmptyInput);
}

TEST(SegmentSentences, SplitsAfterTerminator) {
  const TokenSequence seq({"Good", " movie", ".", " I", " cri", "ed", "."});
  ASSERT_EQ(seq.text(), "Good movie. I cried.");
  const auto seg = segment_sentences(seq);
  ASSERT_EQ(seg.size(), 2u);
  EXPECT_EQ(seg.units[0].token_begin, 0u);
  EXPECT_EQ(seg.units[0].token_end, 3u);
  EXPECT_EQ(seg.units[1].token_end, 7u);
  EXPECT_EQ(completion_timesteps(seg), (Steps{3, 7}));
  EXPECT_EQ(seg.unit_text(0), "Good movie.");
  EXPECT_EQ(seg.unit_text(1), " I cried.");
}

TEST(SegmentSentences, NoTerminatorIsOneUnit) {
  const auto seg = segment_sentences(TokenSequence::from_words({"no", "stop", "here"}));
  EXPECT_EQ(seg.size(), 1u);
  EXPECT_EQ(completion_timesteps(seg), (Steps{3}));
}

TEST(SegmentSentences, AbbreviationBeforeLowercase) {
  const auto seg = segment_sentences(TokenSequence::from_words({"e.g.", "it", "works", "."}));
  EXPECT_EQ(seg.size(), 1u);
}

TEST(SegmentSentences, QuoteOpensSentenceAndHierarchyIsBalanced) {
  const auto seg = segment_sentences(
      TokenSequence::from_words({"One.", "Two!", "\"Three?\"", "Four."}));
  EXPECT_EQ(seg.size(), 4u);
  EXPECT_EQ(seg.hierarchy.to_string(), "[[0,1],[2,3]]");
}

TEST(SegmentSpans, DepthCutKeepsMaximalConstituents) {
  const auto seg = segment_spans_from_tree(TokenSequence::from_words({"the", "cat", "sat"}),
                                           "(S (NP the cat) (VP sat))", SpanOptions{2});
  ASSERT_EQ(seg.size(), 2u);
  EXPECT_EQ(seg.unit_text(0), "the cat");
  EXPECT_EQ(seg.unit_text(1), " sat");
  EXPECT_EQ(seg.hierarchy.to_string(), "[0,1]");
  EXPECT_EQ(completion_timesteps(seg), (Steps{2, 3}));
}

TEST(SegmentSpans, FlatTreeBinarizesLeft) {
  const auto seg = segment_spans_from_tree(TokenSequence::from_words({"a", "b", "c"}), "(S a b c)",
                                           SpanOptions{1});
  EXPECT_EQ(seg.size(), 3u);
  EXPECT_EQ(seg.hierarchy.to_string(), "[[0,1],2]");
}

TEST(SegmentSpans, WholeSentenceWithinBudgetIsOneUnit) {
  const auto seg = segment_spans_from_tree(TokenSequence::from_words({"the", "cat", "sat"}),
                                           "(S (NP the cat) (VP sat))");
  EXPECT_EQ(seg.size(), 1u);
}

TEST(SegmentSpans, LeafMismatchNamesLeaf) {
  std::string msg;
  EXPECT_EQ(kind_of([] {
              segment_spans_from_tree(TokenSequence::from_words({"the", "cat"}), "(S the dog)");
            },
            &msg),
            ErrorKind::kAlignment);
  EXPECT_NE(msg.find("leaf 2"), std::string::npos) << msg;
  EXPECT_EQ(kind_of([] { segment_spans_from_tree(TokenSequence::from_words({"a", "b"}), "(S a)"); }),
            ErrorKind::kAlignment);
}

TEST(BracketedTree, UnbalancedReportsOffset) {
  std::string msg;
  EXPECT_EQ(kind_of([] { parse_bracketed("(S (NP a b)"); }, &msg), ErrorKind::kParse);
  EXPECT_NE(msg.find("offset"), std::string::npos) << msg;
  EXPECT_EQ(kind_of([] { parse_bracketed("(S a))"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_bracketed("()"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_bracketed(""); }), ErrorKind::kParse);
}

TEST(BracketedTree, LabelsOptional) {
  // Only a node opened directly by "(" is unlabeled; otherwise the first atom
  // is the label.
  const auto root = parse_bracketed("( (S (NP a b) (VP c)) )");
  EXPECT_EQ(tree_leaves(root), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(root.leaf_count, 3u);
  const auto labelled = parse_bracketed("(ROOT (S (NP (DT the) (NN cat)) (VP (VBD sat))))");
  EXPECT_EQ(tree_leaves(labelled), (std::vector<std::string>{"the", "cat", "sat"}));
}

TEST(HeuristicHierarchy, CommaAndCoordinatorBoundary) {
  // The comma closes unit 1 and "but" opens unit 2, so the top split falls
  // between them; the remaining pairs split at their midpoints.
  const auto seq = TokenSequence::from_words({"cheap", ",", "but", "good"});
  const auto seg = segment_tokens(seq);
  EXPECT_EQ(seg.hierarchy.to_string(), "[[0,1],[2,3]]");
  const auto seq2 = TokenSequence::from_words({"cheap,", "but", "good"});
  EXPECT_EQ(segment_tokens(seq2).hierarchy.to_string(), "[0,[1,2]]");
}

TEST(HeuristicHierarchy, PriorityOrder) {
  EXPECT_EQ(segment_tokens(TokenSequence::from_words({"a", "b", "c", "d"})).hierarchy.to_string(),
            "[[0,1],[2,3]]");
  EXPECT_EQ(segment_tokens(TokenSequence::from_words({"x,", "y.", "z", "w"})).hierarchy.to_string(),
            "[[0,1],[2,3]]");
  EXPECT_EQ(segment_tokens(TokenSequence::from_words({"x.", "y;", "z", "w"})).hierarchy.to_string(),
            "[0,[1,[2,3]]]");
  EXPECT_EQ(segment_tokens(TokenSequence::from_words({"a", "and", "b", "c", "d", "or", "e"}))
                .hierarchy.to_string(),
            "[[0,[[1,2],[3,4]]],[5,6]]");
}

TEST(CompletionTimesteps, FromTokenRanges) {
  SegmentationResult seg;
  seg.units = {UnitSpan{0, 0, 2, 0, 3, 2}, UnitSpan{1, 2, 5, 3, 9, 5}};
  EXPECT_EQ(completion_timesteps(seg), (Steps{2, 5}));
}

// Randomized partition, timestep and round-trip properties for every
// granularity.
TEST(SegmentationProperties, TilingTimestepsRoundTrip) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> words{"the", "cat", "sat", ".", "Dogs", "bark", ",", "and", "run", "!", "ok?", "So"};
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng() % 14;
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < n; ++i) toks.push_back(words[rng() % words.size()]);
    const auto seq = TokenSequence::from_words(toks);

    std::string tree = "(S";
    for (std::size_t i = 0; i < n;) {
      const std::size_t len = std::min<std::size_t>(n - i, 1 + rng() % 4);
      tree += " (X";
      for (std::size_t k = 0; k < len; ++k) tree += " " + toks[i + k];
      tree += ")";
      i += len;
    }
    tree += ")";

    for (const auto& seg : {segment_tokens(seq), segment_sentences(seq),
                            segment_spans_from_tree(seq, tree, SpanOptions{1 + rng() % 5})}) {
      EXPECT_NO_THROW(validate(seg));
      const auto t = completion_timesteps(seg);
      for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(t[i - 1], t[i]);
      EXPECT_EQ(t.back(), n);
      std::string joined;
      for (std::size_t i = 0; i < seg.size(); ++i) joined += seg.unit_text(i);
      EXPECT_EQ(joined, seq.text());
      seg.hierarchy.validate(seg.size());
    }
    EXPECT_EQ(segment_sentences(seq).hierarchy, segment_sentences(seq).hierarchy);
  }
}

}  // namespace
