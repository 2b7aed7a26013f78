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

#include "fixtures.h"

#include <set>

namespace valuedec::testing {

std::vector<BidwordEntry> random_entries(std::mt19937_64& rng, const RandomTrieSpec& spec) {
  std::uniform_int_distribution<std::size_t> count(1, spec.max_words);
  std::uniform_int_distribution<std::size_t> length(1, spec.max_length);
  std::uniform_int_distribution<TokenId> token(spec.first_token,
                                               static_cast<TokenId>(spec.vocab - 1));
  std::uniform_real_distribution<double> ecpm(0.0, spec.max_ecpm);
  const std::size_t target = count(rng);
  std::set<std::vector<TokenId>> seen;
  std::vector<BidwordEntry> out;
  for (std::size_t attempt = 0; out.size() < target && attempt < target * 20; ++attempt) {
    std::vector<TokenId> w(length(rng));
    for (auto& t : w) t = token(rng);
    if (!seen.insert(w).second) continue;
    out.push_back({std::move(w), ecpm(rng), ""});
  }
  return out;
}

TableScorer random_table_scorer(std::mt19937_64& rng, const std::vector<BidwordEntry>& entries,
                                const std::string& query, std::size_t vocab) {
  TableScorer scorer(vocab, kEndOfSequenceToken);
  std::set<std::vector<TokenId>> prefixes;
  for (const auto& e : entries) {
    for (std::size_t n = 0; n <= e.tokens.size(); ++n) {
      prefixes.emplace(e.tokens.begin(), e.tokens.begin() + static_cast<std::ptrdiff_t>(n));
    }
  }
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (const auto& p : prefixes) {
    if (rng() % 3 == 0) continue;
    std::vector<double> d(vocab);
    double z = 0.0;
    for (auto& x : d) z += (x = u(rng));
    for (auto& x : d) x /= z;
    scorer.set(query, p, std::move(d));
  }
  return scorer;
}

}  // namespace valuedec::testing
