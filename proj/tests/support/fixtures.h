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

// Random fixtures shared by the decoder tests and the acceptance suite.

#ifndef VALUEDEC_TESTS_SUPPORT_FIXTURES_H_
#define VALUEDEC_TESTS_SUPPORT_FIXTURES_H_

#include <random>
#include <string>
#include <vector>

#include "valuedec/scorer.h"
#include "valuedec/trie.h"

namespace valuedec::testing {

struct RandomTrieSpec {
  std::size_t max_words = 64;
  std::size_t max_length = 4;
  TokenId first_token = 2;  // tokens drawn from [first_token, vocab)
  std::size_t vocab = 7;
  double max_ecpm = 50.0;
};

// Between 1 and max_words distinct token sequences with uniform eCPMs.
std::vector<BidwordEntry> random_entries(std::mt19937_64& rng, const RandomTrieSpec& spec);

// Table scorer with a random strictly positive distribution for `query` at
// every prefix of every entry (end-of-sequence id 0). About a third of the
// prefixes are left to the uniform fallback.
TableScorer random_table_scorer(std::mt19937_64& rng, const std::vector<BidwordEntry>& entries,
                                const std::string& query, std::size_t vocab);

}  // namespace valuedec::testing

#endif  // VALUEDEC_TESTS_SUPPORT_FIXTURES_H_
