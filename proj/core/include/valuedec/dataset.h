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

#ifndef VALUEDEC_DATASET_H_
#define VALUEDEC_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "valuedec/tokenizer.h"

namespace valuedec {

struct LoggedBidword {
  std::string text;
  double ecpm = 0.0;
  bool clicked = false;
};

// One search-log impression. `bidwords` is in rank order, best first.
struct LogRecord {
  std::string query;
  std::vector<LoggedBidword> bidwords;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

inline bool operator==(const LoggedBidword& a, const LoggedBidword& b) {
  return a.text == b.text && a.ecpm == b.ecpm && a.clicked == b.clicked;
}

struct QueryBidwordPair {
  std::string query;
  std::string bidword;
  double ecpm = 0.0;

  friend bool operator==(const QueryBidwordPair&, const QueryBidwordPair&) = default;
};

struct ScoredBidword {
  std::string text;
  double ecpm = 0.0;

  friend bool operator==(const ScoredBidword&, const ScoredBidword&) = default;
};

// query -> bidwords. Ordered so iteration is deterministic.
using BidwordLists = std::map<std::string, std::vector<ScoredBidword>>;

enum class ExtractMode {
  kTopRanked,  // first bidword of each record
  kClicked,    // every clicked bidword
  kAll,        // every logged bidword
};

std::vector<QueryBidwordPair> extract_pairs(std::span<const LogRecord> records,
                                            ExtractMode mode);

BidwordLists group_by_query(std::span<const QueryBidwordPair> pairs);

// Sparse real vector, entries sorted by index with no duplicates.
struct Embedding {
  std::vector<std::pair<std::uint32_t, double>> entries;

  double norm() const;
};

double cosine(const Embedding& a, const Embedding& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;
};

// L2-normalized word counts. Words in the vocabulary use their token id;
// other words hash into a block of extra dimensions after it, so every
// non-empty text embeds to a non-zero vector.
class BagOfTokensEmbedder final : public Embedder {
 public:
  static constexpr std::uint32_t kHashBuckets = 1u << 20;

  explicit BagOfTokensEmbedder(std::shared_ptr<const Vocabulary> vocabulary);

  Embedding embed(std::string_view text) const override;
  std::size_t dimension() const override;
  std::string name() const override { return "bag-of-tokens"; }

 private:
  std::shared_ptr<const Vocabulary> vocabulary_;
};

// Fixed text -> dense vector table; unknown texts embed to zero.
class TableEmbedder final : public Embedder {
 public:
  explicit TableEmbedder(std::size_t dimension) : dimension_(dimension) {}

  void set(std::string text, std::vector<double> vector);
  Embedding embed(std::string_view text) const override;
  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return "table"; }

 private:
  std::size_t dimension_;
  std::map<std::string, Embedding, std::less<>> table_;
};

// Cosine of the two embeddings. Throws InvalidArgument on empty text or a
// zero-norm embedding.
double relevance(std::string_view x, std::string_view y, const Embedder& embedder);

// Keeps pairs whose relevance is strictly greater than `tau_rel`.
std::vector<QueryBidwordPair> filter_relevant(
    std::span<const QueryBidwordPair> pairs, double tau_rel,
    const Embedder& embedder);

// Descending eCPM, ties by ascending text.
bool higher_value(const ScoredBidword& a, const ScoredBidword& b);

// Keeps the `max_k` highest-value bidwords per query, sorted by
// higher_value.
BidwordLists truncate_by_value(const BidwordLists& lists, std::size_t max_k = 50);

struct SftPrompts {
  std::string task1 = "Rewrite the search query as one relevant bidword.";
  std::string task2 =
      "List the relevant bidwords for the search query, most valuable first.";
};

struct SftTask1 {
  std::string prompt;
  std::string query;
  std::string bidword;
};

struct SftTask2 {
  std::string prompt;
  std::string query;
  std::vector<std::string> bidword_list;
};

struct SftDatasets {
  std::vector<SftTask1> task1;
  std::vector<SftTask2> task2;
};

// One Task 1 record per pair and one Task 2 record per non-empty list, with
// the list sorted by descending eCPM.
SftDatasets format_sft_tasks(std::span<const QueryBidwordPair> pairs,
                             const BidwordLists& lists,
                             const SftPrompts& prompts = {});

}  // namespace valuedec

#endif  // VALUEDEC_DATASET_H_
