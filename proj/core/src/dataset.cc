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

#include "valuedec/dataset.h"

#include <algorithm>
#include <cmath>

#include "valuedec/error.h"

namespace valuedec {
namespace {

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

void normalize(Embedding& e) {
  const double n = e.norm();
  if (n > 0.0) {
    for (auto& [i, v] : e.entries) v /= n;
  }
}

}  // namespace

std::vector<QueryBidwordPair> extract_pairs(std::span<const LogRecord> records,
                                            ExtractMode mode) {
  std::vector<QueryBidwordPair> out;
  for (const auto& r : records) {
    switch (mode) {
      case ExtractMode::kTopRanked:
        if (!r.bidwords.empty()) {
          out.push_back({r.query, r.bidwords.front().text, r.bidwords.front().ecpm});
        }
        break;
      case ExtractMode::kClicked:
        for (const auto& b : r.bidwords) {
          if (b.clicked) out.push_back({r.query, b.text, b.ecpm});
        }
        break;
      case ExtractMode::kAll:
        for (const auto& b : r.bidwords) out.push_back({r.query, b.text, b.ecpm});
        break;
    }
  }
  return out;
}

BidwordLists group_by_query(std::span<const QueryBidwordPair> pairs) {
  BidwordLists out;
  for (const auto& p : pairs) out[p.query].push_back({p.bidword, p.ecpm});
  return out;
}

// --- Embeddings ---------------------------------------------------------------

double Embedding::norm() const {
  double s = 0.0;
  for (const auto& [i, v] : entries) s += v * v;
  return std::sqrt(s);
}

double cosine(const Embedding& a, const Embedding& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("zero-norm embedding");
  double dot = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      dot += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

BagOfTokensEmbedder::BagOfTokensEmbedder(std::shared_ptr<const Vocabulary> vocabulary)
    : vocabulary_(std::move(vocabulary)) {
  if (!vocabulary_) throw InvalidArgument("embedder needs a vocabulary");
}

std::size_t BagOfTokensEmbedder::dimension() const {
  return vocabulary_->size() + kHashBuckets;
}

Embedding BagOfTokensEmbedder::embed(std::string_view text) const {
  std::vector<std::uint32_t> ids;
  for (const auto word : split_words(text)) {
    if (const auto id = vocabulary_->find(word)) {
      ids.push_back(*id);
    } else {
      ids.push_back(static_cast<std::uint32_t>(vocabulary_->size()) +
                    fnv1a(word) % kHashBuckets);
    }
  }
  std::sort(ids.begin(), ids.end());
  Embedding e;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    e.entries.emplace_back(ids[i], static_cast<double>(j - i));
    i = j;
  }
  normalize(e);
  return e;
}

void TableEmbedder::set(std::string text, std::vector<double> vector) {
  if (vector.size() != dimension_) {
    throw InvalidArgument("embedding has " + std::to_string(vector.size()) +
                          " entries, expected " + std::to_string(dimension_));
  }
  Embedding e;
  for (std::size_t i = 0; i < vector.size(); ++i) {
    if (vector[i] != 0.0) e.entries.emplace_back(static_cast<std::uint32_t>(i), vector[i]);
  }
  table_[std::move(text)] = std::move(e);
}

Embedding TableEmbedder::embed(std::string_view text) const {
  const auto it = table_.find(text);
  return it == table_.end() ? Embedding{} : it->second;
}

double relevance(std::string_view x, std::string_view y, const Embedder& embedder) {
  if (x.empty() || y.empty()) throw InvalidArgument("relevance of empty text");
  return cosine(embedder.embed(x), embedder.embed(y));
}

std::vector<QueryBidwordPair> filter_relevant(
    std::span<const QueryBidwordPair> pairs, double tau_rel,
    const Embedder& embedder) {
  if (!(tau_rel >= -1.0 && tau_rel <= 1.0)) {
    throw InvalidArgument("tau_rel must lie in [-1, 1]");
  }
  std::vector<QueryBidwordPair> out;
  for (const auto& p : pairs) {
    if (relevance(p.query, p.bidword, embedder) > tau_rel) out.push_back(p);
  }
  return out;
}

// --- Truncation / SFT export -----------------------------------------------------

bool higher_value(const ScoredBidword& a, const ScoredBidword& b) {
  if (a.ecpm != b.ecpm) return a.ecpm > b.ecpm;
  return a.text < b.text;
}

BidwordLists truncate_by_value(const BidwordLists& lists, std::size_t max_k) {
  if (max_k == 0) throw InvalidArgument("max_k must be positive");
  BidwordLists out;
  for (const auto& [query, list] : lists) {
    auto sorted = list;
    std::sort(sorted.begin(), sorted.end(), higher_value);
    if (sorted.size() > max_k) sorted.resize(max_k);
    out.emplace(query, std::move(sorted));
  }
  return out;
}

SftDatasets format_sft_tasks(std::span<const QueryBidwordPair> pairs,
                             const BidwordLists& lists, const SftPrompts& prompts) {
  SftDatasets out;
  out.task1.reserve(pairs.size());
  for (const auto& p : pairs) out.task1.push_back({prompts.task1, p.query, p.bidword});
  for (const auto& [query, list] : lists) {
    if (list.empty()) continue;
    auto sorted = list;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScoredBidword& a, const ScoredBidword& b) {
                       return a.ecpm > b.ecpm;
                     });
    SftTask2 t{prompts.task2, query, {}};
    for (auto& b : sorted) t.bidword_list.push_back(std::move(b.text));
    out.task2.push_back(std::move(t));
  }
  return out;
}

}  // namespace valuedec
