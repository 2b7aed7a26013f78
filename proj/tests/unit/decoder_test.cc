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

#include "valuedec/decoder.h"

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "oracles.h"
#include "valuedec/error.h"

namespace valuedec {
namespace {

using Ids = std::vector<TokenId>;
using testing::EnumeratedWord;
using testing::ReferenceStore;
using testing::random_entries;

WeightedTrie Build(std::initializer_list<std::pair<Ids, double>> words) {
  std::vector<BidwordEntry> entries;
  for (const auto& [t, v] : words) entries.push_back({t, v, ""});
  return WeightedTrie::build(entries);
}

DecodeConfig Beam(std::size_t k, std::size_t width, ThetaSchedule theta) {
  DecodeConfig c;
  c.k = k;
  c.beam_width = width;
  c.theta = std::move(theta);
  return c;
}

// --- ThetaSchedule ------------------------------------------------------------

TEST(ThetaScheduleTest, ReferenceSchedulesFollowTheirPatterns) {
  const auto refs = reference_schedules();
  ASSERT_EQ(refs.size(), 5u);
  for (std::size_t d = 1; d <= 10; ++d) {
    EXPECT_EQ(refs[0].schedule.at(d), 0.0);
    EXPECT_EQ(refs[1].schedule.at(d), 1.0);
    EXPECT_EQ(refs[2].schedule.at(d), static_cast<double>(d));
    EXPECT_EQ(refs[3].schedule.at(d), std::ldexp(1.0, static_cast<int>(d) - 1));
    EXPECT_EQ(refs[4].schedule.at(d), std::ldexp(1.0, static_cast<int>(d)));
  }
  EXPECT_EQ(refs[2].schedule.at(5), 5.0);
  EXPECT_EQ(refs[3].schedule.at(4), 8.0);
  EXPECT_EQ(refs[0].name, "theta1");
}

TEST(ThetaScheduleTest, CustomClampsPastTheEnd) {
  const auto s = ThetaSchedule::custom({1.0, 3.0});
  EXPECT_EQ(theta_at_depth(s, 1), 1.0);
  EXPECT_EQ(theta_at_depth(s, 2), 3.0);
  EXPECT_EQ(theta_at_depth(s, 7), 3.0);
}

TEST(ThetaScheduleTest, DepthZeroRejected) {
  EXPECT_THROW(ThetaSchedule::linear(1).at(0), InvalidArgument);
}

TEST(ThetaScheduleTest, ParseAndPrintRoundTrip) {
  for (const char* text : {"zero", "const:1.5", "linear:2", "exp:2,1", "exp:2,2", "custom:0,1,2.5"}) {
    const auto s = ThetaSchedule::parse(text);
    EXPECT_EQ(ThetaSchedule::parse(s.to_string()), s) << text;
  }
  EXPECT_EQ(ThetaSchedule::parse("const:1"), ThetaSchedule::constant(1));
  EXPECT_EQ(ThetaSchedule::parse("exp:2,2").at(3), 8.0);
  EXPECT_EQ(ThetaSchedule::parse("custom:4").at(9), 4.0);
}

TEST(ThetaScheduleTest, ParseRejectsGarbage) {
  for (const char* text : {"", "one", "const:", "const:x", "linear:-1", "exp:2", "exp:2,1,3",
                           "custom:", "custom:1,,2", "custom:1,-2", "const:inf"}) {
    EXPECT_THROW(ThetaSchedule::parse(text), InvalidArgument) << text;
  }
}

// --- Values and configuration -------------------------------------------------

TEST(NodeValueTest, Examples) {
  EXPECT_EQ(node_value(10, 20, {}), 15.0);
  EXPECT_EQ(node_value(7, 7, {0.3, 0.7}), 7.0);
  EXPECT_EQ(node_value(3, 11, {1.0, 0.0}), 3.0);
}

TEST(ConfigTest, Validation) {
  EXPECT_THROW((ValueMix{-0.1, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((ValueMix{0.0, 0.0}.validate()), InvalidArgument);
  DecodeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.k = 20;
  c.beam_width = 10;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.mode = DecodeMode::kSample;
  EXPECT_NO_THROW(c.validate());
  c.k = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = DecodeConfig{};
  c.value_temperature = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = DecodeConfig{};
  c.max_depth = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(ConfigTest, DecodeModeNames) {
  for (auto m : {DecodeMode::kGreedy, DecodeMode::kBeam, DecodeMode::kSample}) {
    EXPECT_EQ(parse_decode_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_decode_mode("nucleus"), InvalidArgument);
}

// --- Step distribution ----------------------------------------------------------

TEST(AdjustStepTest, ZeroThetaIsMaskedRenormalizedLlm) {
  const std::vector<StepCandidate> c = {{2, 1, 1}, {3, 100, 100}, {4, 5, 9}};
  const std::vector<double> p = {0.1, 0.2, 0.3};
  const auto step = adjust_step(c, p, 0.0, {});
  EXPECT_NEAR(step.probabilities[0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(step.probabilities[1], 2.0 / 6, 1e-15);
  EXPECT_NEAR(step.probabilities[2], 3.0 / 6, 1e-15);
}

TEST(AdjustStepTest, TwoChildrenHandComputed) {
  const std::vector<StepCandidate> c = {{2, 100, 100}, {3, 0, 0}};
  const std::vector<double> p = {0.5, 0.5};
  const auto step = adjust_step(c, p, 1.0, {});
  // softmax(100, 0) = (1/(1+e^-100), e^-100/(1+e^-100)).
  const double s1 = 1.0 / (1.0 + std::exp(-100.0));
  const double s2 = 1.0 - s1;
  const double expected = (1 + s1) / ((1 + s1) + (1 + s2));
  EXPECT_NEAR(step.probabilities[0], expected, 1e-15);
  EXPECT_GT(step.probabilities[0], step.probabilities[1]);
  EXPECT_NEAR(step.probabilities[0], 2.0 / 3, 1e-12);
}

TEST(AdjustStepTest, SingleChildGetsEverything) {
  const std::vector<StepCandidate> c = {{5, 3, 4}};
  for (double theta : {0.0, 1.0, 64.0}) {
    EXPECT_EQ(adjust_step(c, std::vector<double>{0.01}, theta, {}).probabilities[0], 1.0);
  }
}

TEST(AdjustStepTest, MatchesScalarReferenceOnRandomSteps) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<StepCandidate> c(n);
    std::vector<double> p(n);
    std::vector<double> values(n);
    const ValueMix mix{u(rng), u(rng) + 0.01};
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = 10 * u(rng);
      c[i] = {static_cast<TokenId>(i), mean, mean + 10 * u(rng)};
      p[i] = u(rng) + 1e-3;
      values[i] = mix.alpha_v * c[i].mean + mix.beta_v * c[i].max;
    }
    const double theta = trial % 4 == 0 ? 0.0 : 8 * u(rng);
    const auto got = adjust_step(c, p, theta, mix);
    const auto want = testing::reference_step(p, values, theta);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(got.probabilities[i], want[i], 1e-12);
      EXPECT_GE(got.probabilities[i], 0.0);
      sum += got.probabilities[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(AdjustStepTest, ValueDominanceAtEqualRelevance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = u(rng);
    const double b = a + 0.01 + u(rng);
    const std::vector<StepCandidate> c = {{2, a, a}, {3, b, b}, {4, u(rng), 30}};
    const std::vector<double> p = {0.2, 0.2, 0.6};
    const auto step = adjust_step(c, p, 0.5 + u(rng), {});
    EXPECT_GT(step.probabilities[1], step.probabilities[0]);
  }
}

TEST(AdjustStepTest, TemperatureFlattensValues) {
  const std::vector<StepCandidate> c = {{2, 100, 100}, {3, 0, 0}};
  const std::vector<double> p = {0.5, 0.5};
  const auto hot = adjust_step(c, p, 1.0, {}, 1e9);
  EXPECT_NEAR(hot.probabilities[0], 0.5, 1e-6);
}

TEST(AdjustStepTest, DeadPrefix) {
  const std::vector<StepCandidate> c = {{2, 1, 1}, {3, 9, 9}};
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_THROW(adjust_step(c, zero, 1.0, {}), DeadPrefixError);
  const auto floored = adjust_step(c, zero, 0.0, {}, 1.0, true);
  EXPECT_DOUBLE_EQ(floored.probabilities[0], 0.5);
  const auto weighted = adjust_step(c, zero, 1.0, {}, 1.0, true);
  EXPECT_GT(weighted.probabilities[1], weighted.probabilities[0]);
  EXPECT_THROW(adjust_step({}, {}, 1.0, {}), InvalidArgument);
}

TEST(AdjustedDistributionTest, MasksFullVocabularyAndReadsEndOfSequence) {
  const auto trie = Build({{{2}, 4.0}, {{2, 3}, 8.0}, {{2, 5}, 1.0}});
  const std::vector<double> p = {0.1, 0.2, 0.1, 0.3, 0.1, 0.2};
  const auto node = trie.children_values(Ids{2});
  const auto step = adjusted_distribution(p, node, 0, 0.0, {});
  ASSERT_EQ(step.symbols, (Ids{3, 5, kEndOfWord}));
  EXPECT_NEAR(step.probabilities[0], 0.3 / 0.6, 1e-15);
  EXPECT_NEAR(step.probabilities[1], 0.2 / 0.6, 1e-15);
  EXPECT_NEAR(step.probabilities[2], 0.1 / 0.6, 1e-15);

  EXPECT_THROW(adjusted_distribution(std::vector<double>{0.5, 0.4, 0, 0, 0, 0}, node, 0, 0, {}),
               InvalidArgument);
  EXPECT_THROW(adjusted_distribution(p, trie.children_values(Ids{4}), 0, 0, {}),
               InvalidArgument);
}

TEST(StepCandidatesTest, EndOfWordOnlyAtWordNodes) {
  const auto trie = Build({{{2}, 4.0}, {{2, 3}, 8.0}});
  const auto root = step_candidates(trie.children_values(Ids{}));
  ASSERT_EQ(root.size(), 1u);
  EXPECT_EQ(root[0].symbol, 2u);
  const auto inner = step_candidates(trie.children_values(Ids{2}));
  ASSERT_EQ(inner.size(), 2u);
  EXPECT_EQ(inner[1].symbol, kEndOfWord);
  EXPECT_EQ(inner[1].mean, 4.0);
  const auto leaf = step_candidates(trie.children_values(Ids{2, 3}));
  ASSERT_EQ(leaf.size(), 1u);
  EXPECT_EQ(leaf[0].symbol, kEndOfWord);
}

// --- decode_topk ------------------------------------------------------------------

TEST(DecodeTest, GreedyPrefersHigherValueAtEqualRelevance) {
  const auto trie = Build({{{1, 2}, 10.0}, {{1, 3}, 20.0}});
  UniformScorer scorer(4);
  DecodeConfig c;
  c.mode = DecodeMode::kGreedy;
  c.theta = ThetaSchedule::constant(1);
  const auto out = decode_topk("q", trie, scorer, c);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].tokens, (Ids{1, 3}));
  EXPECT_EQ(out[0].word_value, 20.0);
  EXPECT_DOUBLE_EQ(out[0].log_prob_llm, 2 * std::log(0.25));
}

TEST(DecodeTest, ZeroThetaTiesBreakLexicographically) {
  const auto trie = Build({{{1, 3}, 20.0}, {{1, 2}, 10.0}});
  UniformScorer scorer(4);
  const auto out = decode_topk("q", trie, scorer, Beam(2, 4, ThetaSchedule::zero()));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].tokens, (Ids{1, 2}));
  EXPECT_EQ(out[1].tokens, (Ids{1, 3}));
  EXPECT_EQ(out[0].log_score_adjusted, out[1].log_score_adjusted);
}

TEST(DecodeTest, UniformScorerRanksByValue) {
  std::vector<BidwordEntry> entries;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (TokenId t = 2; t < 12; ++t) entries.push_back({{t}, u(rng), ""});
  const auto trie = WeightedTrie::build(entries);
  UniformScorer scorer(12);
  const auto out = decode_topk("q", trie, scorer, Beam(10, 10, ThetaSchedule::constant(4)));
  ASSERT_EQ(out.size(), 10u);
  for (std::size_t i = 1; i < out.size(); ++i) {
    EXPECT_GT(out[i - 1].word_value, out[i].word_value);
  }
}

TEST(DecodeTest, PrefixBidwordsAreReachable) {
  const auto trie = Build({{{2}, 5.0}, {{2, 3}, 7.0}, {{2, 3, 4}, 1.0}});
  UniformScorer scorer(5);
  const auto out = decode_topk("q", trie, scorer, Beam(5, 8, ThetaSchedule::linear(1)));
  ASSERT_EQ(out.size(), 3u);
  std::map<Ids, double> seen;
  for (const auto& c : out) seen[c.tokens] = c.word_value;
  EXPECT_EQ(seen.at(Ids{2}), 5.0);
  EXPECT_EQ(seen.at(Ids{2, 3}), 7.0);
  EXPECT_EQ(seen.at(Ids{2, 3, 4}), 1.0);
}

TEST(DecodeTest, MatchesEnumerationOracleOnRandomTries) {
  std::mt19937_64 rng(77);
  const std::vector<ThetaSchedule> schedules = {ThetaSchedule::zero(),
                                                ThetaSchedule::constant(1),
                                                ThetaSchedule::linear(1)};
  for (int trial = 0; trial < 40; ++trial) {
    testing::RandomTrieSpec spec;
    spec.max_words = 40;
    spec.max_ecpm = trial % 2 ? 5.0 : 50.0;
    const auto entries = random_entries(rng, spec);
    const auto trie = WeightedTrie::build(entries);
    ReferenceStore ref;
    ref.build(entries);
    const auto scorer = testing::random_table_scorer(rng, entries, "q", spec.vocab);
    for (const auto& theta : schedules) {
      const auto expected = testing::enumerate_adjusted(ref.words(), "q", scorer, theta, {});
      const std::size_t k = std::min<std::size_t>(expected.size(), 10);
      const auto got =
          decode_topk("q", trie, scorer, Beam(k, std::max<std::size_t>(entries.size(), k), theta));
      ASSERT_EQ(got.size(), k);
      for (std::size_t i = 0; i < k; ++i) {
        ASSERT_EQ(got[i].tokens, expected[i].tokens) << "trial " << trial << " rank " << i;
        EXPECT_NEAR(got[i].log_score_adjusted, expected[i].log_score, 1e-9);
        EXPECT_TRUE(trie.contains(got[i].tokens));
      }
    }
  }
}

TEST(DecodeTest, ZeroThetaScoreIsLlmScore) {
  std::mt19937_64 rng(6);
  const auto entries = random_entries(rng, {});
  const auto trie = WeightedTrie::build(entries);
  const auto scorer = testing::random_table_scorer(rng, entries, "q", 7);
  for (const auto& c : decode_topk("q", trie, scorer, Beam(5, 64, ThetaSchedule::zero()))) {
    // Masking renormalizes, so the adjusted score can only be higher.
    EXPECT_GE(c.log_score_adjusted, c.log_prob_llm - 1e-12);
  }
}

TEST(DecodeTest, NarrowBeamStillInVocabulary) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto entries = random_entries(rng, {});
    const auto trie = WeightedTrie::build(entries);
    const auto scorer = testing::random_table_scorer(rng, entries, "q", 7);
    const auto out = decode_topk("q", trie, scorer, Beam(3, 3, ThetaSchedule::linear(1)));
    EXPECT_FALSE(out.empty());
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_TRUE(trie.contains(out[i].tokens));
      if (i > 0) EXPECT_TRUE(ranks_before(out[i - 1], out[i]));
    }
  }
}

TEST(DecodeTest, Errors) {
  UniformScorer scorer(4);
  EXPECT_THROW(decode_topk("q", WeightedTrie(), scorer, DecodeConfig{}), InvalidArgument);
  const auto trie = Build({{{6}, 1.0}});
  EXPECT_THROW(decode_topk("q", trie, scorer, DecodeConfig{}), VocabularyMismatch);
  EXPECT_THROW(decode_topk("q", trie, UniformScorer(8), Beam(5, 2, ThetaSchedule::zero())),
               InvalidArgument);
}

TEST(DecodeTest, DeadPrefixStrictAndSmoothed) {
  const auto trie = Build({{{2, 3}, 1.0}, {{2, 4}, 9.0}, {{5}, 2.0}});
  TableScorer scorer(6);
  // After [2] the scorer puts all mass on tokens outside the trie.
  scorer.set("q", Ids{2}, {0.0, 0.5, 0.5, 0.0, 0.0, 0.0});
  auto config = Beam(3, 4, ThetaSchedule::constant(1));
  config.strict = true;
  EXPECT_THROW(decode_topk("q", trie, scorer, config), DeadPrefixError);
  config.strict = false;
  const auto out = decode_topk("q", trie, scorer, config);
  ASSERT_EQ(out.size(), 3u);
  // Flooring renormalizes the dead step, so it keeps its value preference
  // and costs the path nothing.
  EXPECT_EQ(out[0].tokens, (Ids{2, 4}));
  EXPECT_EQ(out[1].tokens, (Ids{5}));
  EXPECT_EQ(out[2].tokens, (Ids{2, 3}));
}

TEST(DecodeTest, MaxDepthCutsLongWords) {
  const auto trie = Build({{{2, 2, 2, 2, 2}, 1.0}, {{3}, 1.0}});
  UniformScorer scorer(4);
  auto config = Beam(2, 2, ThetaSchedule::zero());
  config.max_depth = 3;
  const auto out = decode_topk("q", trie, scorer, config);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].tokens, (Ids{3}));
}

// --- Sampling -----------------------------------------------------------------------

TEST(SampleTest, SingleBidwordAlwaysReturned) {
  const auto trie = Build({{{2, 3}, 4.0}});
  UniformScorer scorer(4);
  DecodeConfig c;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.seed = seed;
    const auto s = sample_one("q", trie, scorer, c);
    EXPECT_EQ(s.tokens, (Ids{2, 3}));
    EXPECT_EQ(s.log_score_adjusted, 0.0);
    EXPECT_EQ(s.word_value, 4.0);
  }
}

TEST(SampleTest, DeterministicForFixedSeed) {
  std::mt19937_64 rng(3);
  const auto entries = random_entries(rng, {});
  const auto trie = WeightedTrie::build(entries);
  const auto scorer = testing::random_table_scorer(rng, entries, "q", 7);
  DecodeConfig c;
  c.theta = ThetaSchedule::linear(1);
  c.seed = 99;
  const auto a = sample_one("q", trie, scorer, c);
  const auto b = sample_one("q", trie, scorer, c);
  EXPECT_EQ(a.tokens, b.tokens);
  EXPECT_EQ(a.log_score_adjusted, b.log_score_adjusted);
  EXPECT_TRUE(trie.contains(a.tokens));
}

TEST(SampleTest, SampleModeReturnsDistinctContainedCandidates) {
  std::mt19937_64 rng(5);
  testing::RandomTrieSpec spec;
  spec.max_words = 30;
  const auto entries = random_entries(rng, spec);
  const auto trie = WeightedTrie::build(entries);
  const auto scorer = testing::random_table_scorer(rng, entries, "q", 7);
  DecodeConfig c;
  c.mode = DecodeMode::kSample;
  c.k = 5;
  c.seed = 1;
  const auto out = decode_topk("q", trie, scorer, c);
  EXPECT_EQ(out.size(), std::min<std::size_t>(5, entries.size()));
  std::set<Ids> distinct;
  for (const auto& s : out) {
    EXPECT_TRUE(trie.contains(s.tokens));
    distinct.insert(s.tokens);
  }
  EXPECT_EQ(distinct.size(), out.size());
  EXPECT_EQ(decode_topk("q", trie, scorer, c).front().tokens, out.front().tokens);
}

TEST(SampleTest, LogScoreMatchesEnumeration) {
  std::mt19937_64 rng(9);
  const auto entries = random_entries(rng, {});
  const auto trie = WeightedTrie::build(entries);
  ReferenceStore ref;
  ref.build(entries);
  const auto scorer = testing::random_table_scorer(rng, entries, "q", 7);
  const auto theta = ThetaSchedule::exponential(2, 1);
  std::map<Ids, double> exact;
  for (const auto& e : testing::enumerate_adjusted(ref.words(), "q", scorer, theta, {})) {
    exact[e.tokens] = e.log_score;
  }
  DecodeConfig c;
  c.theta = theta;
  SplitMix64 gen(4);
  for (int i = 0; i < 200; ++i) {
    const auto s = sample_one("q", trie, scorer, c, gen);
    EXPECT_NEAR(s.log_score_adjusted, exact.at(s.tokens), 1e-9);
  }
}

TEST(SampleTest, DeadPrefixRetriesThenFails) {
  const auto trie = Build({{{2, 3}, 1.0}});
  TableScorer scorer(4);
  scorer.set("q", Ids{2}, {0.5, 0.5, 0.0, 0.0});
  DecodeConfig c;
  c.max_retries = 2;
  EXPECT_THROW(sample_one("q", trie, scorer, c), DeadPrefixError);
}

}  // namespace
}  // namespace valuedec
