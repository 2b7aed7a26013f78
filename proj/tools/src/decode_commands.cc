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


// fit-ngram, decode, eval, theta-sweep.

#include <iomanip>
#include <memory>

#include "command.h"
#include "valuedec/dataset.h"
#include "valuedec/decoder.h"
#include "valuedec/error.h"
#include "valuedec/eval.h"
#include "valuedec/experiment.h"
#include "valuedec/jsonl.h"
#include "valuedec/logging.h"
#include "valuedec/scorer.h"
#include "valuedec/tokenizer.h"
#include "valuedec/trie.h"

namespace valuedec::cli {
namespace {

struct DecodeFlags {
  std::size_t k = 10;
  std::size_t beam = 16;
  std::string mode = "beam";
  std::string theta = "zero";
  double alpha_v = 0.5;
  double beta_v = 0.5;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  std::size_t max_depth = 64;
  bool strict = false;

  DecodeConfig to_config() const {
    DecodeConfig c;
    c.k = k;
    c.beam_width = beam;
    c.mode = parse_decode_mode(mode);
    c.theta = ThetaSchedule::parse(theta);
    c.value_mix = {alpha_v, beta_v};
    c.value_temperature = temperature;
    c.seed = seed;
    c.max_depth = max_depth;
    c.strict = strict;
    c.validate();
    return c;
  }
};

void add_decode_flags(CLI::App* cmd, DecodeFlags& f, bool with_theta = true) {
  cmd->add_option("--k", f.k, "candidates per query");
  cmd->add_option("--beam", f.beam, "beam width");
  cmd->add_option("--mode", f.mode, "greedy|beam|sample")
      ->check(CLI::IsMember({"greedy", "beam", "sample"}));
  if (with_theta) {
    cmd->add_option("--theta", f.theta, "zero|const:C|linear:S|exp:B,S|custom:v1,v2,...");
  }
  cmd->add_option("--alpha-v", f.alpha_v, "weight of a node's mean value");
  cmd->add_option("--beta-v", f.beta_v, "weight of a node's max value");
  cmd->add_option("--temperature", f.temperature, "divides node values before the softmax");
  cmd->add_option("--seed", f.seed, "sampling seed");
  cmd->add_option("--max-depth", f.max_depth, "longest candidate in tokens");
  cmd->add_flag("--strict", f.strict, "fail on dead prefixes instead of smoothing");
}

struct FitOptions {
  std::string logs;
  std::string trie;
  std::string vocab;
  std::string out;
  std::string pairs = "all";
  std::size_t order = 2;
  double delta = 0.1;
  std::uint32_t buckets = 1u << 16;
};

struct DecodeOptions {
  std::string trie;
  std::string vocab;
  std::string scorer;
  std::string queries;
  std::string out;
  std::size_t threads = 1;
  DecodeFlags decode;
};

struct EvalOptions {
  std::string run;
  std::string logs;
  std::string vocab;
  std::string out;
  std::string csv;
  std::vector<std::size_t> ks = {5, 50};
};

struct SweepOptions {
  std::string logs;
  std::string out;
  std::size_t max_queries = 0;
  std::size_t threads = 1;
  std::vector<std::size_t> ks = {5, 50};
  std::size_t order = 2;
  double delta = 0.1;
  DecodeFlags decode;
};

void fit_ngram(const FitOptions& o, Context& ctx) {
  if (o.vocab.empty() && o.trie.empty()) throw InvalidArgument("give --vocab or --trie");
  const Tokenizer tokenizer(Vocabulary::load(vocab_path_for(o.trie, o.vocab)));
  const auto records = read_log_records(o.logs);
  const auto pairs = extract_pairs(records, parse_extract_mode(o.pairs));
  if (pairs.empty()) throw InvalidArgument("no training pairs in " + o.logs);
  std::vector<TrainingPair> training;
  training.reserve(pairs.size());
  for (const auto& p : pairs) training.push_back({p.query, tokenizer.encode(p.bidword)});

  NgramOptions options;
  options.order = o.order;
  options.delta = o.delta;
  options.buckets = o.buckets;
  const auto model = NgramModel::fit(training, tokenizer.vocabulary().size(), options);
  ctx.write_output(o.out, [&](std::ostream& s) { model.save(s); });
  ctx.out() << "pairs           " << training.size() << '\n'
            << "contexts        " << model.context_count() << '\n'
            << "perplexity      " << format_double(model.perplexity(training)) << '\n';
}

void decode(const DecodeOptions& o, Context& ctx) {
  const DecodeConfig config = o.decode.to_config();
  const auto trie = WeightedTrie::load(o.trie);
  const Tokenizer tokenizer(Vocabulary::load(vocab_path_for(o.trie, o.vocab)));
  const std::string scorer_spec =
      o.scorer.empty() ? "uniform:" + std::to_string(tokenizer.vocabulary().size()) : o.scorer;
  const auto scorer = open_scorer(scorer_spec);
  check_compatible(trie, *scorer);
  if (scorer->vocabulary_size() != tokenizer.vocabulary().size()) {
    throw VocabularyMismatch("scorer covers " + std::to_string(scorer->vocabulary_size()) +
                             " tokens but the vocabulary has " +
                             std::to_string(tokenizer.vocabulary().size()));
  }

  const auto queries = read_queries(o.queries);
  const auto decoded = decode_queries(queries, trie, *scorer, tokenizer, config, o.threads);
  ctx.write_output(o.out, [&](std::ostream& s) {
    for (const auto& d : decoded) s << to_json_line(d) << '\n';
  });

  // Post-hoc check that every emitted text maps back onto a stored bidword.
  std::size_t candidates = 0;
  std::size_t outside = 0;
  for (const auto& d : decoded) {
    for (const auto& c : d.candidates) {
      ++candidates;
      if (!trie.contains(tokenizer.encode(c.text))) ++outside;
    }
  }
  ctx.out() << "queries         " << decoded.size() << '\n'
            << "candidates      " << candidates << '\n'
            << "oovr            "
            << format_double(candidates ? static_cast<double>(outside) / candidates : 0.0)
            << '\n';
}

void eval(const EvalOptions& o, Context& ctx) {
  EvalConfig config;
  config.ks = o.ks;
  config.validate();
  const auto decoded = read_decoded(o.run);
  const auto truth = ground_truth_from_logs(read_log_records(o.logs));
  auto vocab = std::make_shared<Vocabulary>(o.vocab.empty() ? Vocabulary()
                                                            : Vocabulary::load(o.vocab));
  const BagOfTokensEmbedder embedder(vocab);
  const auto report = evaluate(to_run(decoded), truth, embedder, config);
  if (!o.out.empty()) {
    ctx.write_output(o.out, [&](std::ostream& s) { s << report.to_json() << '\n'; });
  }
  if (!o.csv.empty()) {
    ctx.write_output(o.csv, [&](std::ostream& s) { s << report.to_csv(); });
  }
  ctx.out() << report.to_text();
}

void theta_sweep(const SweepOptions& o, Context& ctx) {
  SweepConfig config;
  config.decode = o.decode.to_config();
  config.eval.ks = o.ks;
  config.eval.validate();
  config.max_queries = o.max_queries;
  config.threads = o.threads;
  NgramOptions ngram;
  ngram.order = o.order;
  ngram.delta = o.delta;

  const auto records = read_log_records(o.logs);
  const auto experiment = prepare_experiment(records, ngram);
  const BagOfTokensEmbedder embedder(
      std::make_shared<Vocabulary>(experiment.tokenizer.vocabulary()));
  const auto rows = valuedec::theta_sweep(experiment, config, embedder);
  const std::string csv = sweep_csv(rows);
  ctx.write_output(o.out, [&](std::ostream& s) { s << csv; });

  auto& out = ctx.out();
  out << std::left << std::setw(8) << "name" << std::setw(14) << "rho" << std::setw(14)
      << "relevance" << std::setw(14) << "mean_ecpm" << "oovr\n";
  for (const auto& r : rows) {
    out << std::setw(8) << r.name << std::setw(14) << r.report.spearman_rho << std::setw(14)
        << r.report.mean_relevance << std::setw(14) << r.report.mean_ecpm << r.report.oovr
        << '\n';
  }
}

}  // namespace

void add_decode_commands(Registry& registry) {
  {
    auto o = std::make_shared<FitOptions>();
    auto* cmd = registry.add("fit-ngram", "Fit the n-gram scorer on logged query-bidword pairs",
                             [o](Context& ctx) { fit_ngram(*o, ctx); });
    registry.require(cmd->add_option("--logs", o->logs, "log JSONL"));
    registry.require(cmd->add_option("--out,--scorer", o->out, "model file to write"));
    cmd->add_option("--trie", o->trie, "trie whose vocabulary the model must share");
    cmd->add_option("--vocab", o->vocab, "vocabulary file (default <trie>.vocab)");
    cmd->add_option("--pairs", o->pairs, "top|clicked|all")
        ->check(CLI::IsMember({"top", "clicked", "all"}));
    cmd->add_option("--order", o->order, "n-gram order");
    cmd->add_option("--delta", o->delta, "additive smoothing constant");
    cmd->add_option("--buckets", o->buckets, "hashed query classes");
  }
  {
    auto o = std::make_shared<DecodeOptions>();
    auto* cmd = registry.add("decode", "Decode top-K bidwords for every query in a JSONL file",
                             [o](Context& ctx) { decode(*o, ctx); });
    registry.require(cmd->add_option("--trie", o->trie, "trie file"));
    registry.require(cmd->add_option("--queries", o->queries, "query JSONL"));
    registry.require(cmd->add_option("--out", o->out, "output JSONL"));
    cmd->add_option("--scorer", o->scorer,
                    "uniform:V, a table JSON or an n-gram file (default uniform)");
    cmd->add_option("--vocab", o->vocab, "vocabulary file (default <trie>.vocab)");
    cmd->add_option("--threads", o->threads, "worker threads (0 = all cores)");
    add_decode_flags(cmd, o->decode);
  }
  {
    auto o = std::make_shared<EvalOptions>();
    auto* cmd = registry.add("eval", "Score a decoded run against logged clicks and eCPM",
                             [o](Context& ctx) { eval(*o, ctx); });
    registry.require(cmd->add_option("--run", o->run, "decoded JSONL"));
    registry.require(cmd->add_option("--logs", o->logs, "log JSONL with the ground truth"));
    cmd->add_option("--vocab", o->vocab, "vocabulary for the relevance embedder");
    cmd->add_option("--out", o->out, "report JSON");
    cmd->add_option("--csv", o->csv, "per-query CSV");
    cmd->add_option("--ks", o->ks, "hitrate cutoffs, ascending")->delimiter(',');
  }
  {
    auto o = std::make_shared<SweepOptions>();
    auto* cmd = registry.add("theta-sweep",
                             "Decode and evaluate a log corpus under the five reference "
                             "theta schedules",
                             [o](Context& ctx) { theta_sweep(*o, ctx); });
    registry.require(cmd->add_option("--logs", o->logs, "log JSONL"));
    registry.require(cmd->add_option("--out", o->out, "CSV with one row per schedule"));
    cmd->add_option("--max-queries", o->max_queries, "decode only the first N queries");
    cmd->add_option("--threads", o->threads, "worker threads (0 = all cores)");
    cmd->add_option("--ks", o->ks, "hitrate cutoffs, ascending")->delimiter(',');
    cmd->add_option("--order", o->order, "n-gram order");
    cmd->add_option("--delta", o->delta, "additive smoothing constant");
    add_decode_flags(cmd, o->decode, /*with_theta=*/false);
  }
}

}  // namespace valuedec::cli
