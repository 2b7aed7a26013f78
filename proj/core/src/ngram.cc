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

// N-gram file layout (little-endian):
//
//   "NGRAM"        5 bytes magic
//   version        u8, currently 1
//   order          u32
//   delta          f64
//   buckets        u32
//   vocabulary     u64
//   eos            u32
//   context_count  u64
//   context_count times, sorted by (bucket, history):
//     bucket       u32
//     history      (order - 1) x u32, 0xFFFFFFFF marks "before start"
//     entry_count  u32
//     entry_count times, sorted by token: token u32, count u32

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include "binary_io.h"
#include "valuedec/error.h"
#include "valuedec/io.h"
#include "valuedec/scorer.h"

namespace valuedec {
namespace {

constexpr std::string_view kMagic = "NGRAM";
constexpr std::uint8_t kVersion = 1;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void validate(const NgramOptions& o) {
  if (o.order < 1 || o.order > NgramModel::kMaxOrder) {
    throw InvalidArgument("n-gram order must be in [1, " +
                          std::to_string(NgramModel::kMaxOrder) + "]");
  }
  if (!(o.delta > 0.0) || !std::isfinite(o.delta)) {
    throw InvalidArgument("smoothing delta must be positive");
  }
  if (o.buckets == 0) throw InvalidArgument("bucket count must be positive");
}

}  // namespace

std::size_t NgramModel::ContextHash::operator()(const Context& c) const noexcept {
  std::uint64_t h = 1469598103934665603ull ^ c.bucket;
  for (TokenId t : c.history) {
    h ^= t;
    h *= 1099511628211ull;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::uint32_t NgramModel::query_class(std::string_view query) const {
  const auto words = split_words(query);
  if (words.empty()) return 0;
  return static_cast<std::uint32_t>(fnv1a(words.front()) % options_.buckets);
}

NgramModel::Context NgramModel::make_context(
    std::uint32_t bucket, std::span<const TokenId> prefix) const {
  Context c;
  c.bucket = bucket;
  const std::size_t width = options_.order - 1;
  for (std::size_t j = 0; j < width; ++j) {
    // history[width - 1] is the most recent token.
    const std::size_t back = width - j;
    c.history[j] = prefix.size() >= back ? prefix[prefix.size() - back] : kBoundary;
  }
  return c;
}

std::uint32_t NgramModel::context_id(const Context& c) const {
  auto it = contexts_.find(c);
  return it == contexts_.end() ? kNoContext : it->second;
}

std::uint32_t NgramModel::intern_context(const Context& c) {
  auto [it, inserted] =
      contexts_.emplace(c, static_cast<std::uint32_t>(context_keys_.size()));
  if (inserted) {
    context_keys_.push_back(c);
    totals_.push_back(0);
  }
  return it->second;
}

std::uint32_t NgramModel::count(std::uint32_t context, TokenId token) const {
  auto it = counts_.find((std::uint64_t{context} << 32) | token);
  return it == counts_.end() ? 0 : it->second;
}

NgramModel NgramModel::fit(std::span<const TrainingPair> pairs,
                           std::size_t vocabulary_size,
                           const NgramOptions& options, TokenId end_of_sequence) {
  validate(options);
  if (vocabulary_size == 0) throw InvalidArgument("vocabulary size must be positive");
  if (end_of_sequence >= vocabulary_size) {
    throw InvalidArgument("end-of-sequence id out of range");
  }
  NgramModel m;
  m.options_ = options;
  m.vocab_size_ = vocabulary_size;
  m.eos_ = end_of_sequence;
  std::vector<TokenId> seq;
  for (const auto& pair : pairs) {
    for (TokenId t : pair.tokens) {
      if (t >= vocabulary_size) {
        throw InvalidArgument("training token " + std::to_string(t) +
                              " outside vocabulary");
      }
    }
    const std::uint32_t bucket = m.query_class(pair.query);
    seq.assign(pair.tokens.begin(), pair.tokens.end());
    seq.push_back(end_of_sequence);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto ctx = m.intern_context(
          m.make_context(bucket, std::span<const TokenId>(seq).first(i)));
      ++m.counts_[(std::uint64_t{ctx} << 32) | seq[i]];
      ++m.totals_[ctx];
    }
  }
  return m;
}

void NgramModel::probabilities(std::string_view query,
                               std::span<const TokenId> prefix,
                               std::span<const TokenId> tokens,
                               std::span<double> out) const {
  const auto ctx = context_id(make_context(query_class(query), prefix));
  const double v = static_cast<double>(vocab_size_);
  if (ctx == kNoContext) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      out[i] = tokens[i] < vocab_size_ ? 1.0 / v : 0.0;
    }
    return;
  }
  const double denom = static_cast<double>(totals_[ctx]) + options_.delta * v;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out[i] = tokens[i] < vocab_size_
                 ? (count(ctx, tokens[i]) + options_.delta) / denom
                 : 0.0;
  }
}

void NgramModel::next_distribution(std::string_view query,
                                   std::span<const TokenId> prefix,
                                   std::span<double> out) const {
  const auto ctx = context_id(make_context(query_class(query), prefix));
  const double v = static_cast<double>(vocab_size_);
  if (ctx == kNoContext) {
    std::fill(out.begin(), out.end(), 1.0 / v);
    return;
  }
  const double denom = static_cast<double>(totals_[ctx]) + options_.delta * v;
  for (std::size_t t = 0; t < vocab_size_; ++t) {
    out[t] = (count(ctx, static_cast<TokenId>(t)) + options_.delta) / denom;
  }
}

std::string NgramModel::describe() const {
  return "ngram:order=" + std::to_string(options_.order) +
         ",delta=" + std::to_string(options_.delta) +
         ",buckets=" + std::to_string(options_.buckets);
}

double NgramModel::perplexity(std::span<const TrainingPair> pairs) const {
  double nll = 0.0;
  std::size_t n = 0;
  std::vector<TokenId> seq;
  for (const auto& pair : pairs) {
    seq.assign(pair.tokens.begin(), pair.tokens.end());
    seq.push_back(eos_);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      double p = 0.0;
      probabilities(pair.query, std::span<const TokenId>(seq).first(i),
                    std::span<const TokenId>(&seq[i], 1), std::span<double>(&p, 1));
      nll -= std::log(p);
      ++n;
    }
  }
  if (n == 0) throw InvalidArgument("perplexity needs at least one token");
  return std::exp(nll / static_cast<double>(n));
}

namespace {

using Row = std::tuple<std::uint32_t, std::array<TokenId, NgramModel::kMaxOrder - 1>,
                       TokenId, std::uint32_t>;

}  // namespace

bool operator==(const NgramModel& a, const NgramModel& b) {
  if (a.options_.order != b.options_.order || a.options_.delta != b.options_.delta ||
      a.options_.buckets != b.options_.buckets || a.vocab_size_ != b.vocab_size_ ||
      a.eos_ != b.eos_ || a.counts_.size() != b.counts_.size() ||
      a.totals_.size() != b.totals_.size()) {
    return false;
  }
  auto rows = [](const NgramModel& m) {
    std::vector<Row> out;
    out.reserve(m.counts_.size());
    for (const auto& [key, c] : m.counts_) {
      const auto& ctx = m.context_keys_[key >> 32];
      out.emplace_back(ctx.bucket, ctx.history,
                       static_cast<TokenId>(key & 0xFFFFFFFFu), c);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return rows(a) == rows(b);
}

void NgramModel::save(std::ostream& out) const {
  internal::BinaryWriter w(out);
  w.bytes(kMagic);
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(options_.order));
  w.f64(options_.delta);
  w.u32(options_.buckets);
  w.u64(vocab_size_);
  w.u32(eos_);

  std::vector<std::uint32_t> order(context_keys_.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    const auto& cx = context_keys_[x];
    const auto& cy = context_keys_[y];
    return std::tie(cx.bucket, cx.history) < std::tie(cy.bucket, cy.history);
  });
  std::vector<std::vector<std::pair<TokenId, std::uint32_t>>> entries(
      context_keys_.size());
  for (const auto& [key, c] : counts_) {
    entries[key >> 32].emplace_back(static_cast<TokenId>(key & 0xFFFFFFFFu), c);
  }
  w.u64(order.size());
  for (std::uint32_t id : order) {
    const auto& ctx = context_keys_[id];
    w.u32(ctx.bucket);
    for (std::size_t j = 0; j + 1 < options_.order; ++j) w.u32(ctx.history[j]);
    auto& list = entries[id];
    std::sort(list.begin(), list.end());
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& [t, c] : list) {
      w.u32(t);
      w.u32(c);
    }
  }
  if (!out) throw IoError("failed writing n-gram model");
}

NgramModel NgramModel::load(std::istream& in) {
  internal::BinaryReader r(in, "n-gram model");
  if (r.bytes(kMagic.size()) != kMagic) r.fail("bad magic");
  if (const auto version = r.u8(); version != kVersion) {
    r.fail("unsupported version " + std::to_string(version));
  }
  NgramModel m;
  m.options_.order = r.u32();
  m.options_.delta = r.f64();
  m.options_.buckets = r.u32();
  m.vocab_size_ = r.u64();
  m.eos_ = r.u32();
  try {
    validate(m.options_);
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
  if (m.vocab_size_ == 0 || m.eos_ >= m.vocab_size_) r.fail("bad vocabulary");
  const std::uint64_t n_contexts = r.u64();
  for (std::uint64_t i = 0; i < n_contexts; ++i) {
    Context ctx;
    ctx.bucket = r.u32();
    if (ctx.bucket >= m.options_.buckets) r.fail("bucket out of range");
    for (std::size_t j = 0; j + 1 < m.options_.order; ++j) ctx.history[j] = r.u32();
    if (m.contexts_.count(ctx) != 0) r.fail("duplicate context");
    const auto id = m.intern_context(ctx);
    const std::uint32_t n_entries = r.u32();
    TokenId last = 0;
    for (std::uint32_t e = 0; e < n_entries; ++e) {
      const TokenId t = r.u32();
      const std::uint32_t c = r.u32();
      if (t >= m.vocab_size_) r.fail("token out of range");
      if (e > 0 && t <= last) r.fail("entries out of order");
      if (c == 0) r.fail("zero count");
      last = t;
      m.counts_[(std::uint64_t{id} << 32) | t] = c;
      m.totals_[id] += c;
    }
  }
  if (!r.at_end()) r.fail("trailing bytes");
  return m;
}

void NgramModel::save(const std::filesystem::path& path) const {
  write_atomically(path, [this](std::ostream& out) { save(out); });
}

NgramModel NgramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load(in);
}

}  // namespace valuedec
