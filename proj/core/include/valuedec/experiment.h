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

#ifndef VALUEDEC_EXPERIMENT_H_
#define VALUEDEC_EXPERIMENT_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "valuedec/dataset.h"
#include "valuedec/decoder.h"
#include "valuedec/eval.h"
#include "valuedec/jsonl.h"
#include "valuedec/scorer.h"
#include "valuedec/tokenizer.h"
#include "valuedec/trie.h"

namespace valuedec {

// Decodes every query against one trie snapshot. Work is spread over
// `threads` workers (0 = hardware concurrency); the result order always
// matches `queries`. Candidate text is the tokenizer's rendering.
std::vector<DecodedQuery> decode_queries(std::span<const std::string> queries,
                                         const WeightedTrie& trie,
                                         const TokenScorer& scorer,
                                         const Tokenizer& tokenizer,
                                         const DecodeConfig& config,
                                         std::size_t threads = 1);

std::vector<RunOutput> to_run(std::span<const DecodedQuery> decoded);

// Everything a sweep needs, derived from one log corpus: a trie of every
// logged bidword at its last logged eCPM, an n-gram scorer fitted on every
// logged (query, bidword) pair, and the ground truth.
struct Experiment {
  Tokenizer tokenizer;
  WeightedTrie trie;
  std::unique_ptr<NgramModel> scorer;
  GroundTruth truth;
  std::vector<std::string> queries;  // distinct, in first-seen order
};

Experiment prepare_experiment(std::span<const LogRecord> records,
                              const NgramOptions& ngram = {});

struct SweepConfig {
  DecodeConfig decode;
  std::vector<NamedSchedule> schedules = reference_schedules();
  EvalConfig eval;
  std::size_t max_queries = 0;  // 0 = all
  std::size_t threads = 1;
};

struct SweepRow {
  std::string name;
  std::string theta;
  EvaluationReport report;
};

// Decodes the experiment's queries once per schedule and evaluates each run.
std::vector<SweepRow> theta_sweep(const Experiment& experiment, const SweepConfig& config,
                                  const Embedder& embedder);

// name,theta,hitrate@K...,relevance,spearman_rho,mean_ecpm,oovr
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace valuedec

#endif  // VALUEDEC_EXPERIMENT_H_
