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

#include "valuedec/tokenizer.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "valuedec/error.h"
#include "valuedec/io.h"

namespace valuedec {
namespace {

constexpr std::string_view kEndOfSequenceString = "<eos>";
constexpr std::string_view kUnknownString = "<unk>";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::size_t code_point_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::vector<std::string_view> split_code_points(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = code_point_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t j = 1; j < len; ++j) {
      if ((static_cast<unsigned char>(text[i + j]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

Vocabulary::Vocabulary() {
  intern(kEndOfSequenceString);
  intern(kUnknownString);
}

TokenId Vocabulary::intern(std::string_view token) {
  std::string key(token);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) {
    throw InvalidArgument("token id " + std::to_string(id) +
                          " outside vocabulary of size " +
                          std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

void Vocabulary::write(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::read(std::istream& in) {
  Vocabulary vocab;
  vocab.tokens_.clear();
  vocab.index_.clear();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ParseError(line_no, "empty vocabulary entry");
    if (vocab.index_.count(line) != 0) {
      throw ParseError(line_no, "duplicate vocabulary entry '" + line + "'");
    }
    vocab.intern(line);
  }
  if (vocab.tokens_.size() < 2 ||
      vocab.tokens_[kEndOfSequenceToken] != kEndOfSequenceString ||
      vocab.tokens_[kUnknownToken] != kUnknownString) {
    throw FormatError("vocabulary must start with <eos> and <unk>");
  }
  return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  write_atomically(path, [this](std::ostream& out) { write(out); });
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read(in);
}

std::vector<TokenId> Tokenizer::encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (auto word : split_words(text)) {
    if (auto id = vocabulary_.find(word)) {
      ids.push_back(*id);
      continue;
    }
    for (auto cp : split_code_points(word)) {
      ids.push_back(vocabulary_.find(cp).value_or(kUnknownToken));
    }
  }
  return ids;
}

std::vector<TokenId> Tokenizer::encode_and_grow(std::string_view text) {
  std::vector<TokenId> ids;
  for (auto word : split_words(text)) {
    if (auto id = vocabulary_.find(word)) {
      ids.push_back(*id);
      continue;
    }
    ids.push_back(vocabulary_.intern(word));
    for (auto cp : split_code_points(word)) vocabulary_.intern(cp);
  }
  return ids;
}

std::string Tokenizer::decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i != 0) out.push_back(' ');
    out += vocabulary_.token(tokens[i]);
  }
  return out;
}

}  // namespace valuedec
