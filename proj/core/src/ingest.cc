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

#include "valuedec/ingest.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "valuedec/error.h"

namespace valuedec {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Returns an error message, or nullopt when the line parsed into `out`.
std::optional<std::string> parse_line(std::string_view line, TsvRecord& out) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) return "expected bidword<TAB>ecpm";
  if (line.find('\t', tab + 1) != std::string_view::npos) {
    return "too many fields";
  }
  const auto bidword = trim(line.substr(0, tab));
  if (bidword.empty()) return "empty bidword";
  const auto value = parse_ecpm(trim(line.substr(tab + 1)));
  if (!value) return "invalid eCPM '" + std::string(line.substr(tab + 1)) + "'";
  out.bidword = std::string(bidword);
  out.ecpm = *value;
  return std::nullopt;
}

}  // namespace

std::optional<double> parse_ecpm(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  if (!std::isfinite(v) || v < 0.0) return std::nullopt;
  return v;
}

IngestResult parse_bidword_tsv(std::istream& in, ParseMode mode) {
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    TsvRecord record;
    record.line = line_no;
    if (auto error = parse_line(line, record)) {
      if (mode == ParseMode::kStrict) throw ParseError(line_no, *error);
      result.issues.push_back({line_no, *error});
      continue;
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

IngestResult read_bidword_tsv(const std::filesystem::path& path,
                              ParseMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_bidword_tsv(in, mode);
}

std::vector<BidwordEntry> to_entries(std::span<const TsvRecord> records,
                                     Tokenizer& tokenizer) {
  std::vector<BidwordEntry> entries;
  entries.reserve(records.size());
  for (const auto& r : records) {
    entries.push_back({tokenizer.encode_and_grow(r.bidword), r.ecpm, r.bidword});
  }
  return entries;
}

}  // namespace valuedec
