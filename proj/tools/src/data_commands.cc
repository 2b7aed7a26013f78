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


// gen-synthetic, export-sft, sample-pairs, wdpo-demo.

#include <iomanip>
#include <memory>
#include <set>

#include "command.h"
#include "valuedec/align.h"
#include "valuedec/dataset.h"
#include "valuedec/error.h"
#include "valuedec/eval.h"
#include "valuedec/jsonl.h"
#include "valuedec/synthetic.h"

namespace valuedec::cli {
namespace {

using nlohmann::json;

struct SyntheticOptions {
  std::string out;
  std::string bidwords_out;
  std::string queries_out;
  std::size_t num_queries = 10000;
  std::size_t per_family = 20;
  std::size_t bidwords_per_query = 100;
  std::size_t vocab_size = 2000;
  std::string ecpm = "exponential:2";
  double click_rate = 0.1;
  std::uint64_t seed = 0;
};

struct SftOptions {
  std::string logs;
  std::string task1;
  std::string task2;
  std::string vocab;
  std::string pairs = "top";
  double tau_rel = 0.0;
  std::size_t max_k = 50;
};

struct PairOptions {
  std::string logs;
  std::string out;
  std::string pairs = "all";
  double tau = 0.0;
  std::size_t per_query = 1;
  std::size_t max_k = 50;
  std::uint64_t seed = 0;
};

struct DemoOptions {
  std::vector<double> ecpm = {1, 2, 3, 4, 5};
  std::size_t steps = 2000;
  double lr = 1.0;
  double beta = 0.1;
  double tau = 0.0;
  std::size_t pairs_per_step = 8;
  std::uint64_t seed = 0;
  std::size_t trace_every = 100;
  std::string out;
};

void gen_synthetic(const SyntheticOptions& o, Context& ctx) {
  SyntheticSpec spec;
  spec.num_queries = o.num_queries;
  spec.queries_per_family = o.per_family;
  spec.bidwords_per_query = o.bidwords_per_query;
  spec.vocab_size = o.vocab_size;
  spec.ecpm = EcpmDistribution::parse(o.ecpm);
  spec.click_rate = o.click_rate;
  spec.seed = o.seed;
  const auto corpus = valuedec::gen_synthetic(spec);

  ctx.write_output(o.out, [&](std::ostream& s) { write_log_records(s, corpus.records); });
  if (!o.bidwords_out.empty()) {
    ctx.write_output(o.bidwords_out, [&](std::ostream& s) {
      for (const auto& [text, ecpm] : corpus.ecpm) s << text << '\t' << format_double(ecpm) << '\n';
    });
  }
  if (!o.queries_out.empty()) {
    ctx.write_output(o.queries_out, [&](std::ostream& s) {
      std::set<std::string> seen;
      for (const auto& r : corpus.records) {
        if (seen.insert(r.query).second) s << json{{"query", r.query}}.dump() << '\n';
      }
    });
  }
  ctx.out() << "records         " << corpus.records.size() << '\n'
            << "bidwords        " << corpus.ecpm.size() << '\n';
}

void export_sft(const SftOptions& o, Context& ctx) {
  if (o.tau_rel < -1.0 || o.tau_rel > 1.0) throw InvalidArgument("--tau-rel must be in [-1, 1]");
  const auto records = read_log_records(o.logs);
  const BagOfTokensEmbedder embedder(std::make_shared<Vocabulary>(
      o.vocab.empty() ? Vocabulary() : Vocabulary::load(o.vocab)));
  const auto task1_pairs =
      filter_relevant(extract_pairs(records, parse_extract_mode(o.pairs)), o.tau_rel, embedder);
  const auto list_pairs = filter_relevant(extract_pairs(records, ExtractMode::kAll), o.tau_rel,
                                          embedder);
  const auto lists = truncate_by_value(group_by_query(list_pairs), o.max_k);
  const auto sft = format_sft_tasks(task1_pairs, lists);

  ctx.write_output(o.task1, [&](std::ostream& s) {
    for (const auto& t : sft.task1) s << to_json_line(t) << '\n';
  });
  ctx.write_output(o.task2, [&](std::ostream& s) {
    for (const auto& t : sft.task2) s << to_json_line(t) << '\n';
  });
  ctx.out() << "task1 records   " << sft.task1.size() << '\n'
            << "task2 records   " << sft.task2.size() << '\n';
}

void sample_pairs(const PairOptions& o, Context& ctx) {
  const auto records = read_log_records(o.logs);
  const auto lists = truncate_by_value(
      group_by_query(extract_pairs(records, parse_extract_mode(o.pairs))), o.max_k);
  const auto pairs = valuedec::sample_pairs(lists, o.tau, o.per_query, o.seed);
  ctx.write_output(o.out, [&](std::ostream& s) {
    for (const auto& p : pairs) s << to_json_line(p) << '\n';
  });
  ctx.out() << "queries         " << lists.size() << '\n'
            << "pairs           " << pairs.size() << '\n';
}

void wdpo_demo(const DemoOptions& o, Context& ctx) {
  std::vector<ScoredBidword> candidates;
  EcpmMap ecpm;
  for (std::size_t i = 0; i < o.ecpm.size(); ++i) {
    candidates.push_back({"c" + std::to_string(i), o.ecpm[i]});
    ecpm[candidates.back().text] = o.ecpm[i];
  }
  WdpoDemoConfig config;
  config.steps = o.steps;
  config.learning_rate = o.lr;
  config.beta = o.beta;
  config.tau = o.tau;
  config.pairs_per_step = o.pairs_per_step;
  config.seed = o.seed;
  const auto result = valuedec::wdpo_demo(candidates, config);

  std::vector<std::string> ranked;
  for (std::size_t i : result.ranking) ranked.push_back(candidates[i].text);
  const double rho = spearman_rho(ranked, ecpm);

  auto& out = ctx.out();
  out << "step      loss\n";
  const std::size_t every = std::max<std::size_t>(o.trace_every, 1);
  for (std::size_t s = 0; s < result.loss_trace.size(); ++s) {
    if (s % every == 0 || s + 1 == result.loss_trace.size()) {
      out << std::left << std::setw(10) << s << format_double(result.loss_trace[s]) << '\n';
    }
  }
  out << "ranking  ";
  for (const auto& t : ranked) out << ' ' << t;
  out << "\nprobabilities";
  for (double p : result.probabilities) out << ' ' << format_double(p);
  out << "\nrho vs eCPM order  " << format_double(rho) << '\n';

  if (!o.out.empty()) {
    ctx.write_output(o.out, [&](std::ostream& s) {
      s << json{{"ecpm", o.ecpm},
                {"logits", result.logits},
                {"probabilities", result.probabilities},
                {"ranking", result.ranking},
                {"spearman_rho", rho},
                {"loss_trace", result.loss_trace}}
               .dump()
        << '\n';
    });
  }
}

}  // namespace

void add_data_commands(Registry& registry) {
  {
    auto o = std::make_shared<SyntheticOptions>();
    auto* cmd = registry.add("gen-synthetic", "Generate a synthetic search-log corpus",
                             [o](Context& ctx) { gen_synthetic(*o, ctx); });
    registry.require(cmd->add_option("--out,--logs", o->out, "log JSONL to write"));
    cmd->add_option("--bidwords-out", o->bidwords_out, "also write bidword<TAB>ecpm");
    cmd->add_option("--queries-out", o->queries_out, "also write the distinct queries as JSONL");
    cmd->add_option("--num-queries", o->num_queries, "log records");
    cmd->add_option("--per-family", o->per_family, "queries sharing one bidword pool");
    cmd->add_option("--bidwords-per-query", o->bidwords_per_query, "bidword pool size");
    cmd->add_option("--vocab-size", o->vocab_size, "modifier words");
    cmd->add_option("--ecpm", o->ecpm, "exponential:MEAN|lognormal:MU,SIGMA|uniform:LO,HI");
    cmd->add_option("--click-rate", o->click_rate, "probability a logged bidword is clicked");
    cmd->add_option("--seed", o->seed, "generator seed");
  }
  {
    auto o = std::make_shared<SftOptions>();
    auto* cmd = registry.add("export-sft", "Write the two supervised fine-tuning datasets",
                             [o](Context& ctx) { export_sft(*o, ctx); });
    registry.require(cmd->add_option("--logs", o->logs, "log JSONL"));
    registry.require(cmd->add_option("--task1", o->task1, "Task 1 JSONL (query -> bidword)"));
    registry.require(cmd->add_option("--task2", o->task2, "Task 2 JSONL (query -> list)"));
    registry.require(cmd->add_option("--tau-rel", o->tau_rel, "relevance threshold (strict)"));
    cmd->add_option("--pairs", o->pairs, "top|clicked|all, Task 1 pair extraction")
        ->check(CLI::IsMember({"top", "clicked", "all"}));
    cmd->add_option("--max-k", o->max_k, "longest Task 2 list");
    cmd->add_option("--vocab", o->vocab, "vocabulary for the relevance embedder");
  }
  {
    auto o = std::make_shared<PairOptions>();
    auto* cmd = registry.add("sample-pairs", "Sample eCPM preference pairs per query",
                             [o](Context& ctx) { sample_pairs(*o, ctx); });
    registry.require(cmd->add_option("--logs", o->logs, "log JSONL"));
    registry.require(cmd->add_option("--out", o->out, "pair JSONL"));
    registry.require(cmd->add_option("--tau", o->tau, "minimum eCPM gap (strict)"));
    cmd->add_option("--per-query", o->per_query, "pairs drawn per query");
    cmd->add_option("--max-k", o->max_k, "highest-value bidwords kept per query");
    cmd->add_option("--pairs", o->pairs, "top|clicked|all")
        ->check(CLI::IsMember({"top", "clicked", "all"}));
    cmd->add_option("--seed", o->seed, "sampling seed");
  }
  {
    auto o = std::make_shared<DemoOptions>();
    auto* cmd = registry.add("wdpo-demo",
                             "Train a softmax policy over candidates with the weighted "
                             "preference loss",
                             [o](Context& ctx) { wdpo_demo(*o, ctx); });
    cmd->add_option("--ecpm", o->ecpm, "candidate eCPMs")->delimiter(',');
    cmd->add_option("--steps", o->steps, "gradient steps");
    cmd->add_option("--lr", o->lr, "learning rate");
    cmd->add_option("--beta", o->beta, "preference temperature");
    cmd->add_option("--tau", o->tau, "minimum eCPM gap for a pair");
    cmd->add_option("--pairs-per-step", o->pairs_per_step, "minibatch size");
    cmd->add_option("--seed", o->seed, "pair sampling seed");
    cmd->add_option("--trace-every", o->trace_every, "print the loss every N steps");
    cmd->add_option("--out", o->out, "result JSON");
  }
}

}  // namespace valuedec::cli
