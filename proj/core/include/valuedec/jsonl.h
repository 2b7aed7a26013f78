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

// JSON-lines readers and writers for the pipeline's file formats. Readers
// throw ParseError with the 1-based line number; blank lines are skipped.

#ifndef VALUEDEC_JSONL_H_
#define VALUEDEC_JSONL_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "valuedec/align.h"
#include "valuedec/dataset.h"

namespace valuedec {

// {"query", "bidwords": [{"text", "ecpm", "clicked"}]}
std::vector<LogRecord> read_log_records(std::istream& in);
std::vector<LogRecord> read_log_records(const std::filesystem::path& path);
void write_log_records(std::ostream& out, std::span<const LogRecord> records);

// {"query"}; extra fields are ignored.
std::vector<std::string> read_queries(std::istream& in);
std::vector<std::string> read_queries(const std::filesystem::path& path);

struct DecodedCandidate {
  std::string text;
  double log_score = 0.0;
  double value = 0.0;

  friend bool operator==(const DecodedCandidate&, const DecodedCandidate&) = default;
};

struct DecodedQuery {
  std::string query;
  std::vector<DecodedCandidate> candidates;

  friend bool operator==(const DecodedQuery&, const DecodedQuery&) = default;
};

// {"query", "candidates": [{"text", "log_score", "value"}]}
std::string to_json_line(const DecodedQuery& decoded);
std::vector<DecodedQuery> read_decoded(std::istream& in);
std::vector<DecodedQuery> read_decoded(const std::filesystem::path& path);

// {"query", "chosen", "rejected", "ecpm_chosen", "ecpm_rejected"}
std::string to_json_line(const PreferencePair& pair);
std::vector<PreferencePair> read_preference_pairs(std::istream& in);

// {"task": 1, "prompt", "query", "bidword"} and
// {"task": 2, "prompt", "query", "bidword_list"}
std::string to_json_line(const SftTask1& task);
std::string to_json_line(const SftTask2& task);

}  // namespace valuedec

#endif  // VALUEDEC_JSONL_H_
