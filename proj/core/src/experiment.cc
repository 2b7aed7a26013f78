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

#include "valuedec/experiment.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "log.h"
#include "valuedec/error.h"

namespace valuedec {

std::vector<DecodedQuery> decode_queries(std::span<const std::string> queries,
                                         const WeightedTrie& trie,
                                         const TokenScorer& scorer,
                                         const Tokenizer& tokenizer,
                                         const DecodeConfig& config,
                                         std::size_t threads) {
  config.validate();
  std::vector<DecodedQuery> out(queries.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(queries.size(), 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= queries.size()) return;
      try {
        DecodedQuery d;
        d.query = queries[i];
        for (const auto& c : decode_topk(queries[i], trie, scorer, config)) {
          d.candidates.push_back({tokenizer.decode(c.tokens), c.log_score_adjusted, c.word_value});
        }
        out[i] = std::move(d);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(queries.size());
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<RunOutput> to_run(std::span<const DecodedQuery> decoded) {
  std::vector<RunOutput> run;
  run.reserve(decoded.size());
  for (const auto& d : decoded) {
    RunOutput r{d.query, {}};
    for (const auto& c : d.candidates) r.candidates.push_back(c.text);
    run.push_back(std::move(r));
  }
  return run;
}

Experiment prepare_experiment(std::span<const LogRecord> records, const NgramOptions& ngram) {
  if (records.empty()) throw InvalidArgument("experiment needs log records");
  Experiment ex;
  ex.truth = ground_truth_from_logs(records);

  std::vector<BidwordEntry> entries;
  entries.reserve(ex.truth.ecpm.size());
  for (const auto& [text, ecpm] : ex.truth.ecpm) {
    entries.push_back({ex.tokenizer.encode_and_grow(text), ecpm, text});
  }
  ex.trie = WeightedTrie::build(entries);

  const auto pairs = extract_pairs(records, ExtractMode::kAll);
  std::vector<TrainingPair> training;
  training.reserve(pairs.size());
  for (const auto& p : pairs) training.push_back({p.query, ex.tokenizer.encode(p.bidword)});
  ex.scorer = std::make_unique<NgramModel>(
      NgramModel::fit(training, ex.tokenizer.vocabulary().size(), ngram));

  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.query).second) ex.queries.push_back(r.query);
  }
  return ex;
}

std::vector<SweepRow> theta_sweep(const Experiment& experiment, const SweepConfig& config,
                                  const Embedder& embedder) {
  if (config.schedules.empty()) throw InvalidArgument("sweep needs at least one schedule");
  std::span<const std::string> queries = experiment.queries;
  if (config.max_queries > 0 && queries.size() > config.max_queries) {
    queries = queries.first(config.max_queries);
  }
  std::vector<SweepRow> rows;
  for (const auto& [name, schedule] : config.schedules) {
    DecodeConfig decode = config.decode;
    decode.theta = schedule;
    const auto decoded = decode_queries(queries, experiment.trie, *experiment.scorer,
                                        experiment.tokenizer, decode, config.threads);
    const auto run = to_run(decoded);
    rows.push_back({name, schedule.to_string(),
                    evaluate(run, experiment.truth, embedder, config.eval)});
    internal::logger().info("sweep {}: rho {:.4f} relevance {:.4f} eCPM {:.4f}", name,
                            rows.back().report.spearman_rho,
                            rows.back().report.mean_relevance, rows.back().report.mean_ecpm);
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "name,theta";
  if (!rows.empty()) {
    for (const auto& [k, v] : rows.front().report.hitrate_at) os << ",hitrate@" << k;
  }
  os << ",relevance,spearman_rho,mean_ecpm,oovr\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.name << ",\"" << r.theta << '"';
    for (const auto& [k, v] : r.report.hitrate_at) os << ',' << v;
    os << ',' << r.report.mean_relevance << ',' << r.report.spearman_rho << ','
       << r.report.mean_ecpm << ',' << r.report.oovr << '\n';
  }
  return os.str();
}

}  // namespace valuedec
