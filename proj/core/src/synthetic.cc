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

#include "valuedec/synthetic.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "valuedec/error.h"

namespace valuedec {
namespace {

std::vector<double> parse_params(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma - start);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size() ||
        !std::isfinite(v)) {
      throw InvalidArgument("bad eCPM distribution parameter '" + std::string(piece) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Fisher-Yates driven by our own generator.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace

EcpmDistribution EcpmDistribution::exponential(double mean) {
  if (!(mean > 0.0)) throw InvalidArgument("exponential mean must be positive");
  EcpmDistribution d;
  d.kind_ = Kind::kExponential;
  d.a_ = mean;
  return d;
}

EcpmDistribution EcpmDistribution::lognormal(double mu, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("lognormal sigma must be >= 0");
  EcpmDistribution d;
  d.kind_ = Kind::kLogNormal;
  d.a_ = mu;
  d.b_ = sigma;
  return d;
}

EcpmDistribution EcpmDistribution::uniform(double lo, double hi) {
  if (!(lo >= 0.0 && hi >= lo)) throw InvalidArgument("uniform needs 0 <= lo <= hi");
  EcpmDistribution d;
  d.kind_ = Kind::kUniform;
  d.a_ = lo;
  d.b_ = hi;
  return d;
}

EcpmDistribution EcpmDistribution::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("bad eCPM distribution '" + std::string(text) + "'");
  }
  const auto head = text.substr(0, colon);
  const auto p = parse_params(text.substr(colon + 1));
  if (head == "exponential" && p.size() == 1) return exponential(p[0]);
  if (head == "lognormal" && p.size() == 2) return lognormal(p[0], p[1]);
  if (head == "uniform" && p.size() == 2) return uniform(p[0], p[1]);
  throw InvalidArgument("bad eCPM distribution '" + std::string(text) + "'");
}

std::string EcpmDistribution::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::kExponential:
      os << "exponential:" << a_;
      break;
    case Kind::kLogNormal:
      os << "lognormal:" << a_ << "," << b_;
      break;
    case Kind::kUniform:
      os << "uniform:" << a_ << "," << b_;
      break;
  }
  return os.str();
}

double EcpmDistribution::sample(SplitMix64& rng) const {
  switch (kind_) {
    case Kind::kExponential:
      return rng.exponential(a_);
    case Kind::kLogNormal:
      return std::exp(a_ + b_ * rng.normal());
    case Kind::kUniform:
      return a_ + (b_ - a_) * rng.uniform();
  }
  return 0.0;
}

void SyntheticSpec::validate() const {
  if (vocab_size == 0 || num_queries == 0 || queries_per_family == 0 ||
      bidwords_per_query == 0) {
    throw InvalidArgument("synthetic sizes must be positive");
  }
  if (bidwords_per_query > vocab_size) {
    throw InvalidArgument("bidwords_per_query exceeds the modifier vocabulary");
  }
  if (!(click_rate >= 0.0 && click_rate <= 1.0)) {
    throw InvalidArgument("click_rate must lie in [0, 1]");
  }
}

SyntheticCorpus gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  const std::size_t families =
      (spec.num_queries + spec.queries_per_family - 1) / spec.queries_per_family;

  SyntheticCorpus corpus;
  corpus.records.reserve(spec.num_queries);
  std::vector<std::size_t> modifiers(spec.vocab_size);
  std::vector<LoggedBidword> pool;
  for (std::size_t f = 0; f < families; ++f) {
    const std::string head = "h" + std::to_string(f);
    // Partial shuffle picks bidwords_per_query distinct modifiers.
    std::iota(modifiers.begin(), modifiers.end(), 0);
    pool.clear();
    for (std::size_t i = 0; i < spec.bidwords_per_query; ++i) {
      std::swap(modifiers[i], modifiers[i + rng.below(spec.vocab_size - i)]);
      LoggedBidword b;
      b.text = head + " w" + std::to_string(modifiers[i]);
      b.ecpm = spec.ecpm.sample(rng);
      corpus.ecpm.emplace(b.text, b.ecpm);
      pool.push_back(std::move(b));
    }
    const std::size_t first = f * spec.queries_per_family;
    const std::size_t last = std::min(first + spec.queries_per_family, spec.num_queries);
    for (std::size_t q = first; q < last; ++q) {
      LogRecord r;
      r.query = head + " w" + std::to_string(rng.below(spec.vocab_size));
      r.bidwords = pool;
      shuffle(r.bidwords, rng);
      for (auto& b : r.bidwords) b.clicked = rng.bernoulli(spec.click_rate);
      corpus.records.push_back(std::move(r));
    }
  }
  return corpus;
}

std::vector<BidwordEntry> gen_random_bidwords(std::size_t count,
                                              std::size_t vocab_size,
                                              std::size_t min_length,
                                              std::size_t max_length,
                                              const EcpmDistribution& ecpm,
                                              std::uint64_t seed) {
  if (vocab_size < 3) throw InvalidArgument("vocab_size must be at least 3");
  if (min_length == 0 || max_length < min_length) {
    throw InvalidArgument("need 1 <= min_length <= max_length");
  }
  SplitMix64 rng(seed);
  std::vector<BidwordEntry> out(count);
  for (auto& e : out) {
    const std::size_t len = min_length + rng.below(max_length - min_length + 1);
    e.tokens.resize(len);
    for (auto& t : e.tokens) t = static_cast<TokenId>(2 + rng.below(vocab_size - 2));
    e.ecpm = ecpm.sample(rng);
  }
  return out;
}

}  // namespace valuedec
