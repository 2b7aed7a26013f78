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

#ifndef VALUEDEC_DECODER_H_
#define VALUEDEC_DECODER_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuedec/random.h"
#include "valuedec/scorer.h"
#include "valuedec/tokenizer.h"
#include "valuedec/trie.h"

namespace valuedec {

// Depth-indexed multiplier on the value term. Depth 1 is the first generated
// token.
class ThetaSchedule {
 public:
  enum class Kind { kZero, kConstant, kLinear, kExponential, kCustom };

  ThetaSchedule() = default;

  static ThetaSchedule zero();
  static ThetaSchedule constant(double c);
  // theta_d = step * d
  static ThetaSchedule linear(double step);
  // theta_d = scale * base^(d-1)
  static ThetaSchedule exponential(double base, double scale);
  // theta_d = values[d-1], clamped to the last element past the end.
  static ThetaSchedule custom(std::vector<double> values);

  // zero | const:C | linear:S | exp:B,S | custom:v1,v2,...
  static ThetaSchedule parse(std::string_view text);
  std::string to_string() const;

  double at(std::size_t depth) const;
  Kind kind() const noexcept { return kind_; }

  friend bool operator==(const ThetaSchedule&, const ThetaSchedule&) = default;

 private:
  Kind kind_ = Kind::kZero;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> values_;
};

inline double theta_at_depth(const ThetaSchedule& schedule, std::size_t depth) {
  return schedule.at(depth);
}

struct NamedSchedule {
  std::string name;
  ThetaSchedule schedule;
};

// The five reference schedules: all-zero, all-one, 1,2,3,..., 1,2,4,...,
// and 2,4,8,....
std::vector<NamedSchedule> reference_schedules();

// Weights on a node's mean and max aggregates.
struct ValueMix {
  double alpha_v = 0.5;
  double beta_v = 0.5;

  void validate() const;
};

double node_value(double mean, double max, const ValueMix& mix);

enum class DecodeMode { kGreedy, kBeam, kSample };

std::string to_string(DecodeMode mode);
DecodeMode parse_decode_mode(std::string_view text);

struct DecodeConfig {
  std::size_t k = 10;
  std::size_t beam_width = 16;
  DecodeMode mode = DecodeMode::kBeam;
  std::uint64_t seed = 0;
  std::size_t max_depth = 64;
  ThetaSchedule theta;
  ValueMix value_mix;
  // Softmax temperature applied to node values before normalization. 1 means
  // raw eCPM values.
  double value_temperature = 1.0;
  // Strict mode turns dead prefixes into errors instead of smoothing them.
  bool strict = false;
  // Restarts allowed per sampled candidate after hitting a dead prefix.
  std::size_t max_retries = 16;

  void validate() const;
};

// Pseudo-token for "stop here" at a node that ends a bidword but has
// children. It reads the scorer's end-of-sequence probability.
inline constexpr TokenId kEndOfWord = std::numeric_limits<TokenId>::max();

// One legal continuation with its aggregates (the terminal's for kEndOfWord).
struct StepCandidate {
  TokenId symbol;
  double mean;
  double max;
};

struct AdjustedStep {
  std::vector<TokenId> symbols;
  std::vector<double> probabilities;  // sums to 1
};

// Value-aware reweighting of a masked next-token distribution:
//
//   V_k  = alpha_v * mean_k + beta_v * max_k
//   Vn_k = softmax_k(V_k / temperature)
//   p(k) ~ p_llm(k) * (1 + Vn_k * theta)
//
// `p_llm[i]` is the scorer's probability of `candidates[i]`. Throws
// DeadPrefixError when every candidate has zero mass unless `floor_dead`, in
// which case masses are floored at 1e-12 first.
AdjustedStep adjust_step(std::span<const StepCandidate> candidates,
                         std::span<const double> p_llm, double theta,
                         const ValueMix& mix, double temperature = 1.0,
                         bool floor_dead = false);

// Collects the legal continuations of `children`: every child, plus
// kEndOfWord when the node ends a bidword and has children.
std::vector<StepCandidate> step_candidates(const ChildrenValues& children);

// Full-vocabulary form: masks `p_llm` to the children of the node (and the
// end-of-word symbol, read at `end_of_sequence`) and reweights. Requires
// `p_llm` to sum to 1 within 1e-9 and a non-empty candidate set.
AdjustedStep adjusted_distribution(std::span<const double> p_llm,
                                   const ChildrenValues& children,
                                   TokenId end_of_sequence, double theta,
                                   const ValueMix& mix, double temperature = 1.0);

struct Candidate {
  std::vector<TokenId> tokens;
  double log_prob_llm = 0.0;
  double log_score_adjusted = 0.0;
  double word_value = 0.0;
};

// Descending score, then ascending lexicographic token order.
bool ranks_before(const Candidate& a, const Candidate& b);

// Throws VocabularyMismatch when the trie uses ids the scorer cannot score.
void check_compatible(const WeightedTrie& trie, const TokenScorer& scorer);

// Top-k complete bidwords for `query`, best first. Every result is stored
// in `trie`. A node without children ends its candidate with no further
// factor; an internal bidword node ends it by choosing kEndOfWord.
std::vector<Candidate> decode_topk(std::string_view query,
                                   const WeightedTrie& trie,
                                   const TokenScorer& scorer,
                                   const DecodeConfig& config);

// One ancestral sample from the adjusted distributions, seeded by
// config.seed.
Candidate sample_one(std::string_view query, const WeightedTrie& trie,
                     const TokenScorer& scorer, const DecodeConfig& config);

// Same, drawing from `rng`; skips config validation.
Candidate sample_one(std::string_view query, const WeightedTrie& trie,
                     const TokenScorer& scorer, const DecodeConfig& config,
                     SplitMix64& rng);

}  // namespace valuedec

#endif  // VALUEDEC_DECODER_H_
