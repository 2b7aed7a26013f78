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

#include "valuedec/scorer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "valuedec/error.h"
#include "valuedec/io.h"

namespace valuedec {
namespace {

std::string table_key(std::string_view query, std::span<const TokenId> prefix) {
  std::string key(query);
  key.push_back('\0');
  for (TokenId t : prefix) {
    for (int i = 0; i < 4; ++i) key.push_back(static_cast<char>((t >> (8 * i)) & 0xFF));
  }
  return key;
}

void check_tokens(std::span<const TokenId> tokens, std::size_t vocab) {
  for (TokenId t : tokens) {
    if (t >= vocab) {
      throw VocabularyMismatch("token " + std::to_string(t) +
                               " outside scorer vocabulary of size " +
                               std::to_string(vocab));
    }
  }
}

}  // namespace

void check_distribution(std::span<const double> p, double tolerance) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("distribution has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw InvalidArgument("distribution sums to " + std::to_string(sum));
  }
}

// --- TokenScorer ------------------------------------------------------------

void TokenScorer::probabilities(std::string_view query,
                                std::span<const TokenId> prefix,
                                std::span<const TokenId> tokens,
                                std::span<double> out) const {
  const auto full = next_distribution(query, prefix);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out[i] = tokens[i] < full.size() ? full[tokens[i]] : 0.0;
  }
}

std::vector<double> TokenScorer::next_distribution(
    std::string_view query, std::span<const TokenId> prefix) const {
  std::vector<double> out(vocabulary_size());
  next_distribution(query, prefix, out);
  return out;
}

// --- UniformScorer ----------------------------------------------------------

UniformScorer::UniformScorer(std::size_t vocabulary_size, TokenId end_of_sequence)
    : size_(vocabulary_size), eos_(end_of_sequence) {
  if (size_ == 0) throw InvalidArgument("vocabulary size must be positive");
  if (eos_ >= size_) throw InvalidArgument("end-of-sequence id out of range");
}

void UniformScorer::next_distribution(std::string_view, std::span<const TokenId>,
                                      std::span<double> out) const {
  std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(size_));
}

void UniformScorer::probabilities(std::string_view, std::span<const TokenId>,
                                  std::span<const TokenId> tokens,
                                  std::span<double> out) const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out[i] = tokens[i] < size_ ? 1.0 / static_cast<double>(size_) : 0.0;
  }
}

std::string UniformScorer::describe() const {
  return "uniform:" + std::to_string(size_);
}

// --- TableScorer ------------------------------------------------------------

TableScorer::TableScorer(std::size_t vocabulary_size, TokenId end_of_sequence)
    : size_(vocabulary_size), eos_(end_of_sequence) {
  if (size_ == 0) throw InvalidArgument("vocabulary size must be positive");
  if (eos_ >= size_) throw InvalidArgument("end-of-sequence id out of range");
}

void TableScorer::set(std::string_view query, std::span<const TokenId> prefix,
                      std::vector<double> distribution) {
  if (distribution.size() != size_) {
    throw InvalidArgument("distribution has " +
                          std::to_string(distribution.size()) +
                          " entries, expected " + std::to_string(size_));
  }
  check_distribution(distribution);
  check_tokens(prefix, size_);
  table_[table_key(query, prefix)] = std::move(distribution);
}

const std::vector<double>* TableScorer::lookup(
    std::string_view query, std::span<const TokenId> prefix) const {
  auto it = table_.find(table_key(query, prefix));
  return it == table_.end() ? nullptr : &it->second;
}

void TableScorer::next_distribution(std::string_view query,
                                    std::span<const TokenId> prefix,
                                    std::span<double> out) const {
  if (const auto* stored = lookup(query, prefix)) {
    std::copy(stored->begin(), stored->end(), out.begin());
  } else {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(size_));
  }
}

void TableScorer::probabilities(std::string_view query,
                                std::span<const TokenId> prefix,
                                std::span<const TokenId> tokens,
                                std::span<double> out) const {
  const auto* stored = lookup(query, prefix);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= size_) {
      out[i] = 0.0;
    } else {
      out[i] = stored ? (*stored)[tokens[i]] : 1.0 / static_cast<double>(size_);
    }
  }
}

std::string TableScorer::describe() const {
  return "table:" + std::to_string(table_.size()) + "-entries";
}

TableScorer TableScorer::parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    TableScorer scorer(doc.at("vocabulary_size").get<std::size_t>(),
                       doc.value("end_of_sequence", kEndOfSequenceToken));
    for (const auto& e : doc.at("entries")) {
      const auto prefix = e.at("prefix").get<std::vector<TokenId>>();
      scorer.set(e.at("query").get<std::string>(), prefix,
                 e.at("distribution").get<std::vector<double>>());
    }
    return scorer;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("table scorer: ") + ex.what());
  }
}

std::string TableScorer::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  std::vector<std::string> keys;
  keys.reserve(table_.size());
  for (const auto& [k, v] : table_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) {
    const auto sep = k.find('\0');
    std::vector<TokenId> prefix;
    for (std::size_t i = sep + 1; i + 4 <= k.size(); i += 4) {
      TokenId t = 0;
      for (int b = 0; b < 4; ++b) {
        t |= static_cast<TokenId>(static_cast<unsigned char>(k[i + b])) << (8 * b);
      }
      prefix.push_back(t);
    }
    entries.push_back({{"query", k.substr(0, sep)},
                       {"prefix", prefix},
                       {"distribution", table_.at(k)}});
  }
  nlohmann::json doc = {{"vocabulary_size", size_},
                        {"end_of_sequence", eos_},
                        {"entries", std::move(entries)}};
  return doc.dump();
}

TableScorer TableScorer::load(const std::filesystem::path& path) {
  return parse_json(read_file(path));
}

// --- open_scorer ------------------------------------------------------------

std::unique_ptr<TokenScorer> open_scorer(const std::string& spec) {
  constexpr std::string_view kUniform = "uniform:";
  if (spec.rfind(kUniform, 0) == 0) {
    std::size_t v = 0;
    const auto* begin = spec.data() + kUniform.size();
    const auto* end = spec.data() + spec.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || v == 0) {
      throw InvalidArgument("bad uniform scorer spec '" + spec + "'");
    }
    return std::make_unique<UniformScorer>(v);
  }
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw IoError("cannot open scorer " + spec);
  std::string magic(5, '\0');
  in.read(magic.data(), 5);
  in.seekg(0);
  if (magic == "NGRAM") return std::make_unique<NgramModel>(NgramModel::load(in));
  return std::make_unique<TableScorer>(TableScorer::load(spec));
}

}  // namespace valuedec
