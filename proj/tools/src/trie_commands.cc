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


// build-trie, update-trie, inspect-trie.

#include <iomanip>
#include <memory>

#include "command.h"
#include "valuedec/ingest.h"
#include "valuedec/logging.h"
#include "valuedec/tokenizer.h"
#include "valuedec/trie.h"

namespace valuedec::cli {
namespace {

struct BuildOptions {
  std::string input;
  std::string out;
  std::string vocab;
  bool strict = false;
};

struct UpdateOptions {
  std::string trie;
  std::string input;
  std::string vocab;
  double alpha_u = 0.5;
  double beta_u = 0.5;
  bool strict = false;
};

struct InspectOptions {
  std::string trie;
  std::string vocab;
  std::string prefix;
  std::size_t list = 0;
};

ParseMode parse_mode(bool strict) { return strict ? ParseMode::kStrict : ParseMode::kLenient; }

void warn_issues(const IngestResult& parsed, std::ostream& out) {
  for (const auto& issue : parsed.issues) {
    log_warn("line " + std::to_string(issue.line) + ": " + issue.message);
  }
  if (!parsed.issues.empty()) out << "skipped lines   " << parsed.issues.size() << '\n';
}

void print_stats(const TrieStats& stats, std::ostream& out) {
  out << "nodes           " << stats.node_count << '\n'
      << "bidwords        " << stats.bidword_count << '\n'
      << "max depth       " << stats.max_depth << '\n'
      << "depth histogram\n";
  for (std::size_t d = 1; d < stats.depth_histogram.size(); ++d) {
    if (stats.depth_histogram[d] == 0) continue;
    out << "  " << std::setw(4) << d << "  " << stats.depth_histogram[d] << '\n';
  }
}

void build_trie(const BuildOptions& o, Context& ctx) {
  const auto parsed = read_bidword_tsv(o.input, parse_mode(o.strict));
  Tokenizer tokenizer;
  const auto entries = to_entries(parsed.records, tokenizer);
  const auto trie = WeightedTrie::build(entries);

  ctx.write_output(o.out, [&](std::ostream& s) { trie.save(s); });
  ctx.write_output(vocab_path_for(o.out, o.vocab),
                   [&](std::ostream& s) { tokenizer.vocabulary().write(s); });
  warn_issues(parsed, ctx.out());
  print_stats(trie.stats(), ctx.out());
}

void update_trie(const UpdateOptions& o, Context& ctx) {
  const UpdateParams params{o.alpha_u, o.beta_u};
  params.validate();
  auto trie = WeightedTrie::load(o.trie);
  const auto vocab_path = vocab_path_for(o.trie, o.vocab);
  Tokenizer tokenizer(Vocabulary::load(vocab_path));
  const std::size_t vocab_before = tokenizer.vocabulary().size();
  const std::size_t words_before = trie.bidword_count();

  const auto parsed = read_bidword_tsv(o.input, parse_mode(o.strict));
  for (const auto& record : parsed.records) {
    trie.momentum_update(tokenizer.encode_and_grow(record.bidword), record.ecpm, params);
  }

  ctx.write_output(o.trie, [&](std::ostream& s) { trie.save(s); });
  if (tokenizer.vocabulary().size() != vocab_before) {
    ctx.write_output(vocab_path, [&](std::ostream& s) { tokenizer.vocabulary().write(s); });
  }
  warn_issues(parsed, ctx.out());
  ctx.out() << "updates         " << parsed.records.size() << '\n'
            << "new bidwords    " << trie.bidword_count() - words_before << '\n';
  print_stats(trie.stats(), ctx.out());
}

void inspect_trie(const InspectOptions& o, Context& ctx) {
  const auto trie = WeightedTrie::load(o.trie);
  const Tokenizer tokenizer(Vocabulary::load(vocab_path_for(o.trie, o.vocab)));
  auto& out = ctx.out();
  print_stats(trie.stats(), out);
  out << "root mean       " << format_double(trie.root().mean()) << '\n'
      << "root max        " << format_double(trie.root().max()) << '\n';

  if (!o.prefix.empty()) {
    const auto tokens = tokenizer.encode(o.prefix);
    const auto children = trie.children_values(tokens);
    if (!children.found()) {
      out << "prefix '" << o.prefix << "' not in trie\n";
    } else {
      out << "prefix '" << o.prefix << "'\n";
      if (const auto t = children.terminal()) {
        out << "  <end>  mean " << format_double(t->mean) << "  max " << format_double(t->max)
            << '\n';
      }
      for (const auto& c : children) {
        out << "  " << tokenizer.vocabulary().token(c.token) << "  mean "
            << format_double(c.mean) << "  max " << format_double(c.max) << '\n';
      }
    }
  }

  std::size_t shown = 0;
  if (o.list > 0) {
    trie.for_each_bidword([&](std::span<const TokenId> tokens, TerminalValue v) {
      if (shown++ >= o.list) return;
      out << tokenizer.decode(tokens) << '\t' << format_double(v.mean) << '\t'
          << format_double(v.max) << '\n';
    });
  }
}

}  // namespace

void add_trie_commands(Registry& registry) {
  {
    auto o = std::make_shared<BuildOptions>();
    auto* cmd = registry.add("build-trie", "Build a weighted trie from a bidword<TAB>ecpm file",
                             [o](Context& ctx) { build_trie(*o, ctx); });
    registry.require(cmd->add_option("--input", o->input, "bidword TSV"));
    registry.require(cmd->add_option("--out,--trie", o->out, "trie file to write"));
    cmd->add_option("--vocab", o->vocab, "vocabulary file (default <trie>.vocab)");
    cmd->add_flag("--strict", o->strict, "fail on the first malformed line");
  }
  {
    auto o = std::make_shared<UpdateOptions>();
    auto* cmd = registry.add("update-trie", "Apply momentum updates from a feed TSV",
                             [o](Context& ctx) { update_trie(*o, ctx); });
    registry.require(cmd->add_option("--trie", o->trie, "trie file, rewritten in place"));
    registry.require(cmd->add_option("--input", o->input, "feed TSV of bidword<TAB>ecpm"));
    cmd->add_option("--vocab", o->vocab, "vocabulary file (default <trie>.vocab)");
    cmd->add_option("--alpha-u", o->alpha_u, "weight of the incoming eCPM");
    cmd->add_option("--beta-u", o->beta_u, "weight of the stored eCPM");
    cmd->add_flag("--strict", o->strict, "fail on the first malformed line");
  }
  {
    auto o = std::make_shared<InspectOptions>();
    auto* cmd = registry.add("inspect-trie", "Print trie statistics and node values",
                             [o](Context& ctx) { inspect_trie(*o, ctx); });
    registry.require(cmd->add_option("--trie", o->trie, "trie file"));
    cmd->add_option("--vocab", o->vocab, "vocabulary file (default <trie>.vocab)");
    cmd->add_option("--prefix", o->prefix, "show the children of this prefix");
    cmd->add_option("--list", o->list, "print the first N bidwords");
  }
}

}  // namespace valuedec::cli
