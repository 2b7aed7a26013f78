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

#ifndef VALUEDEC_SCORER_H_
#define VALUEDEC_SCORER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "valuedec/tokenizer.h"

namespace valuedec {

// Source of next-token probabilities conditioned on a query and the tokens
// generated so far. Implementations must return a distribution over
// [0, vocabulary_size()) that is non-negative and sums to 1 within 1e-9,
// and must be safe to call concurrently.
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;

  virtual std::size_t vocabulary_size() const = 0;
  virtual TokenId end_of_sequence() const { return kEndOfSequenceToken; }

  // Writes the full distribution into `out` (size vocabulary_size()).
  virtual void next_distribution(std::string_view query,
                                 std::span<const TokenId> prefix,
                                 std::span<double> out) const = 0;

  // Probabilities of `tokens` only. The default gathers from the full
  // distribution; sparse models override it.
  virtual void probabilities(std::string_view query,
                             std::span<const TokenId> prefix,
                             std::span<const TokenId> tokens,
                             std::span<double> out) const;

  virtual std::string describe() const = 0;

  std::vector<double> next_distribution(std::string_view query,
                                        std::span<const TokenId> prefix) const;
};

class UniformScorer final : public TokenScorer {
 public:
  explicit UniformScorer(std::size_t vocabulary_size,
                         TokenId end_of_sequence = kEndOfSequenceToken);

  std::size_t vocabulary_size() const override { return size_; }
  TokenId end_of_sequence() const override { return eos_; }
  using TokenScorer::next_distribution;
  void next_distribution(std::string_view query, std::span<const TokenId> prefix,
                         std::span<double> out) const override;
  void probabilities(std::string_view query, std::span<const TokenId> prefix,
                     std::span<const TokenId> tokens,
                     std::span<double> out) const override;
  std::string describe() const override;

 private:
  std::size_t size_;
  TokenId eos_;
};

// Explicit (query, prefix) -> distribution table with a uniform fallback.
//
// JSON form:
//   {"vocabulary_size": V, "end_of_sequence": 0,
//    "entries": [{"query": "...", "prefix": [ids], "distribution": [V reals]}]}
class TableScorer final : public TokenScorer {
 public:
  explicit TableScorer(std::size_t vocabulary_size,
                       TokenId end_of_sequence = kEndOfSequenceToken);

  // Throws InvalidArgument unless `distribution` is a valid distribution of
  // the right length.
  void set(std::string_view query, std::span<const TokenId> prefix,
           std::vector<double> distribution);
  std::size_t entry_count() const noexcept { return table_.size(); }

  std::size_t vocabulary_size() const override { return size_; }
  TokenId end_of_sequence() const override { return eos_; }
  using TokenScorer::next_distribution;
  void next_distribution(std::string_view query, std::span<const TokenId> prefix,
                         std::span<double> out) const override;
  void probabilities(std::string_view query, std::span<const TokenId> prefix,
                     std::span<const TokenId> tokens,
                     std::span<double> out) const override;
  std::string describe() const override;

  static TableScorer parse_json(std::string_view text);
  std::string to_json() const;
  static TableScorer load(const std::filesystem::path& path);

 private:
  const std::vector<double>* lookup(std::string_view query,
                                    std::span<const TokenId> prefix) const;

  std::size_t size_;
  TokenId eos_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

// (query, bidword tokens) training example for the n-gram scorer.
struct TrainingPair {
  std::string query;
  std::vector<TokenId> tokens;
};

struct NgramOptions {
  std::size_t order = 2;        // 1 = unigram within a query class
  double delta = 0.1;           // additive smoothing constant
  std::uint32_t buckets = 1u << 16;  // number of hashed query classes
};

// Additive-smoothed n-gram model over bidword tokens, conditioned on a hashed
// query class (FNV-1a of the query's first word, modulo `buckets`) and the
// previous order-1 tokens. Every target sequence ends with end-of-sequence.
//
//   p(k | class, history) = (count(ctx, k) + delta) / (count(ctx) + delta * V)
//
// Unseen contexts fall back to the uniform distribution.
class NgramModel final : public TokenScorer {
 public:
  static constexpr std::size_t kMaxOrder = 8;

  static NgramModel fit(std::span<const TrainingPair> pairs,
                        std::size_t vocabulary_size, const NgramOptions& options,
                        TokenId end_of_sequence = kEndOfSequenceToken);

  std::size_t vocabulary_size() const override { return vocab_size_; }
  TokenId end_of_sequence() const override { return eos_; }
  using TokenScorer::next_distribution;
  void next_distribution(std::string_view query, std::span<const TokenId> prefix,
                         std::span<double> out) const override;
  void probabilities(std::string_view query, std::span<const TokenId> prefix,
                     std::span<const TokenId> tokens,
                     std::span<double> out) const override;
  std::string describe() const override;

  const NgramOptions& options() const noexcept { return options_; }
  std::size_t context_count() const noexcept { return totals_.size(); }
  std::uint32_t query_class(std::string_view query) const;

  // Per-token perplexity of the pairs (end-of-sequence included).
  double perplexity(std::span<const TrainingPair> pairs) const;

  // Binary format: see docs/ngram_format.md.
  void save(std::ostream& out) const;
  static NgramModel load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static NgramModel load(const std::filesystem::path& path);

  friend bool operator==(const NgramModel& a, const NgramModel& b);

 private:
  struct Context {
    std::uint32_t bucket = 0;
    std::array<TokenId, kMaxOrder - 1> history{};

    friend bool operator==(const Context&, const Context&) = default;
  };
  struct ContextHash {
    std::size_t operator()(const Context& c) const noexcept;
  };

  NgramModel() = default;
  Context make_context(std::uint32_t bucket, std::span<const TokenId> prefix) const;
  std::uint32_t context_id(const Context& c) const;  // kNoContext if unseen
  std::uint32_t count(std::uint32_t context, TokenId token) const;
  std::uint32_t intern_context(const Context& c);

  static constexpr std::uint32_t kNoContext = ~std::uint32_t{0};
  static constexpr TokenId kBoundary = ~TokenId{0};

  NgramOptions options_;
  std::size_t vocab_size_ = 0;
  TokenId eos_ = kEndOfSequenceToken;
  std::unordered_map<Context, std::uint32_t, ContextHash> contexts_;
  std::vector<Context> context_keys_;
  std::vector<std::uint64_t> totals_;
  // (context id << 32 | token) -> count
  std::unordered_map<std::uint64_t, std::uint32_t> counts_;
};

// Opens a scorer by spec: "uniform:V", a JSON table file or an n-gram file.
std::unique_ptr<TokenScorer> open_scorer(const std::string& spec);

// Throws InvalidArgument unless `p` is non-negative, finite and sums to 1
// within `tolerance`.
void check_distribution(std::span<const double> p, double tolerance = 1e-9);

}  // namespace valuedec

#endif  // VALUEDEC_SCORER_H_
