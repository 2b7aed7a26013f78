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

#ifndef VALUEDEC_SYNTHETIC_H_
#define VALUEDEC_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "valuedec/dataset.h"
#include "valuedec/random.h"
#include "valuedec/trie.h"

namespace valuedec {

// exponential:MEAN | lognormal:MU,SIGMA | uniform:LO,HI
class EcpmDistribution {
 public:
  enum class Kind { kExponential, kLogNormal, kUniform };

  static EcpmDistribution exponential(double mean);
  static EcpmDistribution lognormal(double mu, double sigma);
  static EcpmDistribution uniform(double lo, double hi);
  static EcpmDistribution parse(std::string_view text);
  std::string to_string() const;

  double sample(SplitMix64& rng) const;
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_ = Kind::kExponential;
  double a_ = 1.0;
  double b_ = 0.0;
};

// Query families: family f has head word "h<f>" and a pool of
// `bidwords_per_query` two-word bidwords "h<f> w<i>" with distinct modifier
// words drawn from `vocab_size` candidates. Each query "h<f> w<x>" logs its
// family's whole pool in random order with random clicks. Every bidword gets
// one eCPM drawn independently of its text.
struct SyntheticSpec {
  std::size_t vocab_size = 2000;  // modifier words
  std::size_t num_queries = 10000;
  std::size_t queries_per_family = 20;
  std::size_t bidwords_per_query = 100;
  EcpmDistribution ecpm = EcpmDistribution::exponential(2.0);
  double click_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticCorpus {
  std::vector<LogRecord> records;
  std::map<std::string, double> ecpm;  // ground truth per bidword
};

SyntheticCorpus gen_synthetic(const SyntheticSpec& spec);

// Random token sequences for load tests: lengths uniform in
// [min_length, max_length], token ids uniform in [2, vocab_size), eCPM from
// `ecpm`. Text is left empty.
std::vector<BidwordEntry> gen_random_bidwords(std::size_t count,
                                              std::size_t vocab_size,
                                              std::size_t min_length,
                                              std::size_t max_length,
                                              const EcpmDistribution& ecpm,
                                              std::uint64_t seed);

}  // namespace valuedec

#endif  // VALUEDEC_SYNTHETIC_H_
