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

#ifndef VALUEDEC_INGEST_H_
#define VALUEDEC_INGEST_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuedec/tokenizer.h"
#include "valuedec/trie.h"

namespace valuedec {

enum class ParseMode { kStrict, kLenient };

struct TsvRecord {
  std::string bidword;
  double ecpm = 0.0;
  std::size_t line = 0;
};

struct IngestIssue {
  std::size_t line;
  std::string message;
};

struct IngestResult {
  std::vector<TsvRecord> records;
  std::vector<IngestIssue> issues;  // only populated in lenient mode
};

// Parses `bidword<TAB>ecpm` lines. Blank lines are ignored. In strict mode
// the first malformed line throws ParseError; in lenient mode it is recorded
// in `issues` and skipped.
IngestResult parse_bidword_tsv(std::istream& in, ParseMode mode);
IngestResult read_bidword_tsv(const std::filesystem::path& path,
                              ParseMode mode);

// Parses one decimal eCPM value; nullopt unless finite and non-negative.
std::optional<double> parse_ecpm(std::string_view text);

// Tokenizes each record, growing the vocabulary as needed.
std::vector<BidwordEntry> to_entries(std::span<const TsvRecord> records,
                                     Tokenizer& tokenizer);

}  // namespace valuedec

#endif  // VALUEDEC_INGEST_H_
