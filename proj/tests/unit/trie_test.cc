// Copyright 2026 The valuedec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "valuedec/trie.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "valuedec/error.h"
#include "valuedec/random.h"

namespace valuedec {
namespace {

using Word = std::vector<TokenId>;

WeightedTrie TwoEntryTrie() {
  return WeightedTrie::build(std::vector<BidwordEntry>{{{1, 2}, 10.0, "ab"}, {{1, 3}, 20.0, "ac"}});
}

TEST(TrieBuildTest, ParentAggregatesTwoLeaves) {
  const auto trie = TwoEntryTrie();
  const auto node = trie.find(Word{1});
  ASSERT_TRUE(node.has_value());
  EXPECT_DOUBLE_EQ(node->mean(), 15.0);
  EXPECT_DOUBLE_EQ(node->max(), 20.0);
  EXPECT_FALSE(node->is_word());
}

TEST(TrieBuildTest, SingleLeafIdentity) {
  const auto trie = WeightedTrie::build(std::vector<BidwordEntry>{{{7}, 42.0, "x"}});
  EXPECT_DOUBLE_EQ(trie.root().mean(), 42.0);
  EXPECT_DOUBLE_EQ(trie.root().max(), 42.0);
}

TEST(TrieBuildTest, DuplicateKeepsLastEcpm) {
  const auto trie = WeightedTrie::build(
      std::vector<BidwordEntry>{{{1, 2}, 10.0, ""}, {{1, 2}, 30.0, ""}});
  EXPECT_EQ(trie.bidword_count(), 1u);
  EXPECT_DOUBLE_EQ(trie.find(Word{1, 2})->terminal()->mean, 30.0);
}

TEST(TrieBuildTest, RejectsEmptyInputs) {
  EXPECT_THROW(WeightedTrie::build(std::vector<BidwordEntry>{}), InvalidArgument);
  EXPECT_THROW(WeightedTrie::build(std::vector<BidwordEntry>{{{}, 1.0, ""}}), InvalidArgument);
}

TEST(TrieBuildTest, RejectsBadEcpm) {
  EXPECT_THROW(WeightedTrie::build(std::vector<BidwordEntry>{{{1}, -1.0, ""}}), InvalidArgument);
  EXPECT_THROW(WeightedTrie::build(std::vector<BidwordEntry>{
                   {{1}, std::numeric_limits<double>::quiet_NaN(), ""}}),
               InvalidArgument);
  EXPECT_THROW(WeightedTrie::build(std::vector<BidwordEntry>{
                   {{1}, std::numeric_limits<double>::infinity(), ""}}),
               InvalidArgument);
}

TEST(TrieBuildTest, PrefixBidwordKeepsItsOwnValue) {
  // [1] is both a bidword and the parent of [1,2].
  const auto trie = WeightedTrie::build(
      std::vector<BidwordEntry>{{{1}, 4.0, ""}, {{1, 2}, 10.0, ""}});
  const auto node = trie.find(Word{1});
  ASSERT_TRUE(node->is_word());
  EXPECT_DOUBLE_EQ(node->terminal()->mean, 4.0);
  EXPECT_DOUBLE_EQ(node->mean(), 7.0);
  EXPECT_DOUBLE_EQ(node->max(), 10.0);
}

TEST(TrieBuildTest, RandomEntriesMatchRecursiveOracle) {
  SplitMix64 rng(11);
  std::vector<BidwordEntry> entries;
  for (int i = 0; i < 200; ++i) {
    Word w(1 + rng.below(4));
    for (auto& t : w) t = static_cast<TokenId>(rng.below(5));
    entries.push_back({w, std::floor(rng.uniform() * 1000.0) / 10.0, ""});
  }
  const auto trie = WeightedTrie::build(entries);
  testing::ReferenceStore reference;
  reference.build(entries);
  const auto mismatch = testing::compare_to_reference(trie, reference);
  EXPECT_FALSE(mismatch.has_value()) << mismatch->what;
}

TEST(TrieMomentumTest, SubstitutesUpdateRules) {
  auto trie = WeightedTrie::build(std::vector<BidwordEntry>{{{1, 2}, 10.0, ""}});
  trie.momentum_update(Word{1, 2}, 20.0, {0.5, 0.5});
  const auto t = *trie.find(Word{1, 2})->terminal();
  EXPECT_DOUBLE_EQ(t.mean, 15.0);
  EXPECT_DOUBLE_EQ(t.max, 20.0);
  // Ancestors re-aggregate from the single child.
  EXPECT_DOUBLE_EQ(trie.root().mean(), 15.0);
  EXPECT_DOUBLE_EQ(trie.root().max(), 20.0);
}

TEST(TrieMomentumTest, AbsentBidwordInitializesBothSides) {
  auto trie = TwoEntryTrie();
  trie.momentum_update(Word{4, 5}, 8.0, {0.3, 0.7});
  EXPECT_TRUE(trie.contains(Word{4, 5}));
  const auto t = *trie.find(Word{4, 5})->terminal();
  EXPECT_DOUBLE_EQ(t.mean, 8.0);
  EXPECT_DOUBLE_EQ(t.max, 8.0);
}

TEST(TrieMomentumTest, ClosedFormConvergence) {
  auto trie = WeightedTrie::build(std::vector<BidwordEntry>{{{3}, 50.0, ""}});
  const UpdateParams params{0.25, 0.75};
  const double e = 10.0;
  for (int t = 1; t <= 20; ++t) {
    trie.momentum_update(Word{3}, e, params);
    const double w = trie.find(Word{3})->terminal()->mean;
    const double expected = std::pow(0.75, t) * 40.0;
    EXPECT_NEAR(std::abs(w - e), expected, 1e-9 * expected) << "t=" << t;
  }
}

TEST(TrieMomentumTest, FixedPointAndMaxMonotonicity) {
  auto trie = WeightedTrie::build(std::vector<BidwordEntry>{{{3}, 12.5, ""}});
  trie.momentum_update(Word{3}, 12.5, {0.4, 0.6});
  EXPECT_DOUBLE_EQ(trie.find(Word{3})->terminal()->mean, 12.5);
  trie.momentum_update(Word{3}, 1.0, {0.4, 0.6});
  EXPECT_DOUBLE_EQ(trie.find(Word{3})->terminal()->max, 12.5);
}

TEST(TrieMomentumTest, RejectsBadInput) {
  auto trie = TwoEntryTrie();
  EXPECT_THROW(trie.momentum_update(Word{}, 1.0, {}), InvalidArgument);
  EXPECT_THROW(trie.momentum_update(Word{1}, 1.0, {0.6, 0.6}), InvalidArgument);
  EXPECT_THROW(trie.momentum_update(Word{1}, -2.0, {}), InvalidArgument);
}

TEST(TrieQueryTest, ChildrenValuesOfRootAndPrefix) {
  const auto trie = TwoEntryTrie();
  const auto root = trie.children_values(Word{});
  ASSERT_EQ(root.size(), 1u);
  EXPECT_EQ(root[0].token, 1u);
  EXPECT_DOUBLE_EQ(root[0].mean, 15.0);
  EXPECT_DOUBLE_EQ(root[0].max, 20.0);
  EXPECT_FALSE(root.terminal().has_value());

  const auto one = trie.children_values(Word{1});
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].token, 2u);
  EXPECT_DOUBLE_EQ(one[0].mean, 10.0);
  EXPECT_DOUBLE_EQ(one[0].max, 10.0);
  EXPECT_EQ(one[1].token, 3u);
  EXPECT_DOUBLE_EQ(one[1].mean, 20.0);
  EXPECT_DOUBLE_EQ(one[1].max, 20.0);
  EXPECT_TRUE(one.find(3).has_value());
  EXPECT_FALSE(one.find(4).has_value());
}

TEST(TrieQueryTest, AbsentPrefixIsEmpty) {
  const auto trie = TwoEntryTrie();
  const auto absent = trie.children_values(Word{9});
  EXPECT_FALSE(absent.found());
  EXPECT_TRUE(absent.empty());
  EXPECT_FALSE(absent.terminal().has_value());
}

TEST(TrieQueryTest, TerminalPresentOnlyForWords) {
  const auto trie = WeightedTrie::build(
      std::vector<BidwordEntry>{{{1}, 4.0, ""}, {{1, 2}, 10.0, ""}});
  const auto cv = trie.children_values(Word{1});
  ASSERT_TRUE(cv.terminal().has_value());
  EXPECT_DOUBLE_EQ(cv.terminal()->mean, 4.0);
}

TEST(TrieQueryTest, Contains) {
  const auto trie = TwoEntryTrie();
  EXPECT_TRUE(trie.contains(Word{1, 2}));
  EXPECT_FALSE(trie.contains(Word{1}));
  EXPECT_FALSE(trie.contains(Word{1, 2, 2}));
  EXPECT_FALSE(trie.contains(Word{}));
}

TEST(TrieRemoveTest, RemoveThenContainsIsFalse) {
  auto trie = TwoEntryTrie();
  EXPECT_TRUE(trie.remove(Word{1, 2}));
  EXPECT_FALSE(trie.contains(Word{1, 2}));
  EXPECT_DOUBLE_EQ(trie.root().mean(), 20.0);
}

TEST(TrieRemoveTest, AbsentWordLeavesTrieUnchanged) {
  auto trie = TwoEntryTrie();
  const auto before = trie;
  EXPECT_FALSE(trie.remove(Word{1}));
  EXPECT_FALSE(trie.remove(Word{5, 5}));
  EXPECT_FALSE(trie.remove(Word{1, 2, 3}));
  EXPECT_TRUE(trie == before);
}

TEST(TrieRemoveTest, EqualsBuildWithoutTheWord) {
  SplitMix64 rng(5);
  std::vector<BidwordEntry> entries;
  for (int i = 0; i < 60; ++i) {
    Word w(1 + rng.below(3));
    for (auto& t : w) t = static_cast<TokenId>(2 + rng.below(4));
    entries.push_back({w, static_cast<double>(rng.below(100)), ""});
  }
  auto trie = WeightedTrie::build(entries);
  const Word victim = entries[17].tokens;
  ASSERT_TRUE(trie.remove(victim));
  std::vector<BidwordEntry> rest;
  for (const auto& e : entries) {
    if (e.tokens != victim) rest.push_back(e);
  }
  testing::ReferenceStore reference;
  reference.build(rest);
  const auto mismatch = testing::compare_to_reference(trie, reference);
  EXPECT_FALSE(mismatch.has_value()) << mismatch->what;
}

TEST(TrieRemoveTest, RemovingEverythingEmptiesTheTrie) {
  auto trie = TwoEntryTrie();
  trie.remove(Word{1, 2});
  trie.remove(Word{1, 3});
  EXPECT_TRUE(trie.empty());
  EXPECT_EQ(trie.node_count(), 1u);
  EXPECT_EQ(trie.token_bound(), 0u);
  EXPECT_DOUBLE_EQ(trie.root().mean(), 0.0);
}

TEST(TrieMiscTest, RecomputeIsIdempotent) {
  auto trie = TwoEntryTrie();
  trie.momentum_update(Word{1, 3}, 2.0, {0.5, 0.5});
  const auto before = trie;
  trie.recompute_all();
  EXPECT_TRUE(trie == before);
  trie.recompute_all();
  EXPECT_TRUE(trie == before);
}

TEST(TrieMiscTest, StatsAndIteration) {
  const auto trie = WeightedTrie::build(std::vector<BidwordEntry>{
      {{1}, 1.0, ""}, {{1, 2}, 2.0, ""}, {{3, 4, 5}, 3.0, ""}});
  const auto stats = trie.stats();
  EXPECT_EQ(stats.bidword_count, 3u);
  EXPECT_EQ(stats.node_count, 6u);
  EXPECT_EQ(stats.max_depth, 3u);
  ASSERT_EQ(stats.depth_histogram.size(), 4u);
  EXPECT_EQ(stats.depth_histogram[1], 1u);
  EXPECT_EQ(stats.depth_histogram[2], 1u);
  EXPECT_EQ(stats.depth_histogram[3], 1u);

  std::vector<Word> seen;
  trie.for_each_bidword([&](std::span<const TokenId> w, TerminalValue) {
    seen.emplace_back(w.begin(), w.end());
  });
  EXPECT_EQ(seen, (std::vector<Word>{{1}, {1, 2}, {3, 4, 5}}));
  EXPECT_EQ(trie.token_bound(), 6u);
}

TEST(TrieMiscTest, ReservedTokenRejected) {
  WeightedTrie trie;
  EXPECT_THROW(trie.momentum_update(Word{std::numeric_limits<TokenId>::max()}, 1.0, {}),
               InvalidArgument);
}

}  // namespace
}  // namespace valuedec
