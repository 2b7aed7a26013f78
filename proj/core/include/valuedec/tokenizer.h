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

#ifndef VALUEDEC_TOKENIZER_H_
#define VALUEDEC_TOKENIZER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace valuedec {

using TokenId = std::uint32_t;

// Ids 0 and 1 are reserved in every vocabulary.
inline constexpr TokenId kEndOfSequenceToken = 0;
inline constexpr TokenId kUnknownToken = 1;

// Splits on ASCII whitespace; empty pieces are dropped.
std::vector<std::string_view> split_words(std::string_view text);

// Splits a UTF-8 string into code points. Malformed bytes come back as
// single-byte pieces rather than failing.
std::vector<std::string_view> split_code_points(std::string_view text);

// Dense string <-> id table. Persisted as UTF-8, one token per line, where
// the line index is the id.
class Vocabulary {
 public:
  Vocabulary();

  TokenId intern(std::string_view token);
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::size_t size() const noexcept { return tokens_.size(); }

  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Whitespace tokenizer with a per-character fallback for unknown words.
class Tokenizer {
 public:
  Tokenizer() = default;
  explicit Tokenizer(Vocabulary vocabulary)
      : vocabulary_(std::move(vocabulary)) {}

  // Known words map to their id; unknown words are spelled out by code point,
  // and code points missing from the vocabulary become kUnknownToken.
  std::vector<TokenId> encode(std::string_view text) const;

  // Like encode(), but interns every new word (and its code points, so the
  // fallback path has something to land on later).
  std::vector<TokenId> encode_and_grow(std::string_view text);

  // Joins token strings with single spaces.
  std::string decode(std::span<const TokenId> tokens) const;

  const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
  Vocabulary& vocabulary() noexcept { return vocabulary_; }

 private:
  Vocabulary vocabulary_;
};

}  // namespace valuedec

#endif  // VALUEDEC_TOKENIZER_H_
