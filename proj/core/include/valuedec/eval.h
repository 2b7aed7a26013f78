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

#ifndef VALUEDEC_EVAL_H_
#define VALUEDEC_EVAL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "valuedec/dataset.h"
#include "valuedec/tokenizer.h"
#include "valuedec/trie.h"

namespace valuedec {

using RewriteMap = std::map<std::string, std::vector<std::string>>;
using ClickMap = std::map<std::string, std::set<std::string>>;
using EcpmMap = std::map<std::string, double, std::less<>>;

// sum_q |top_k(R_q) & C_q| / sum_q |C_q|. Queries missing from `rewrites`
// count as having no rewrites. Throws when no query has clicks.
double hitrate_at_k(const RewriteMap& rewrites, const ClickMap& clicks, std::size_t k);

// 1 - 6 sum d^2 / (n (n^2 - 1)) between the predicted order and descending
// eCPM, over items of `predicted` found in `ecpm` (first occurrence only).
// Reference ranks average over eCPM ties. Throws when fewer than two items
// remain.
double spearman_rho(std::span<const std::string> predicted, const EcpmMap& ecpm);

// Fraction of candidates that are not stored bidwords. Throws on an empty
// candidate list.
double oovr(std::span<const std::vector<TokenId>> candidates, const WeightedTrie& trie);
double oovr(std::span<const std::string> candidates, const std::set<std::string>& bidwords);

// Mean over queries of the mean eCPM of that query's candidates. Unknown
// candidates count as 0 (with a warning); queries without candidates are
// skipped.
double mean_ecpm(const RewriteMap& rewrites, const EcpmMap& ecpm);

struct RunOutput {
  std::string query;
  std::vector<std::string> candidates;  // best first
};

struct GroundTruth {
  ClickMap clicks;
  EcpmMap ecpm;
  std::set<std::string> bidwords;  // the decoding vocabulary, for OOVR
};

struct EvalConfig {
  std::vector<std::size_t> ks = {5, 50};

  void validate() const;
};

struct QueryRow {
  std::string query;
  std::size_t candidates = 0;
  std::size_t clicks = 0;
  std::map<std::size_t, std::size_t> hits_at;  // K -> clicked in top K
  std::optional<double> spearman_rho;          // absent below two items
  double mean_ecpm = 0.0;
  double mean_relevance = 0.0;
  std::size_t out_of_vocabulary = 0;

  friend bool operator==(const QueryRow&, const QueryRow&) = default;
};

struct EvaluationReport {
  static constexpr std::string_view kSchema = "valuedec.eval_report/1";

  std::map<std::size_t, double> hitrate_at;
  double spearman_rho = 0.0;  // mean over queries with a defined rho
  std::size_t spearman_queries = 0;
  double oovr = 0.0;
  double mean_ecpm = 0.0;
  double mean_relevance = 0.0;  // mean over (query, candidate) pairs
  std::string embedder;
  std::size_t query_count = 0;
  std::size_t candidate_count = 0;
  std::vector<QueryRow> per_query;

  std::string to_json() const;
  static EvaluationReport from_json(std::string_view text);
  std::string to_text() const;
  // One row per query.
  std::string to_csv() const;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// Throws InvalidArgument on an empty run.
EvaluationReport evaluate(std::span<const RunOutput> run, const GroundTruth& truth,
                          const Embedder& embedder, const EvalConfig& config = {});

// Clicks, eCPM and bidword set from logs. A bidword's eCPM is the last one
// logged for it.
GroundTruth ground_truth_from_logs(std::span<const LogRecord> records);

}  // namespace valuedec

#endif  // VALUEDEC_EVAL_H_
