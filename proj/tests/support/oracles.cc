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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace valuedec::testing {
namespace {

bool has_prefix(const Word& w, const Word& prefix) {
  return w.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), w.begin());
}

std::string show(const Word& w) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  os << ']';
  return os.str();
}

bool close(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Distinct next tokens after `prefix` among the stored words.
std::vector<TokenId> next_tokens(const std::map<Word, TerminalValue>& words,
                                 const Word& prefix) {
  std::set<TokenId> out;
  for (auto it = words.lower_bound(prefix); it != words.end() && has_prefix(it->first, prefix);
       ++it) {
    if (it->first.size() > prefix.size()) out.insert(it->first[prefix.size()]);
  }
  return {out.begin(), out.end()};
}

std::pair<double, double> aggregate_of(const std::map<Word, TerminalValue>& words,
                                       const Word& prefix) {
  std::vector<double> means;
  std::vector<double> maxes;
  for (TokenId t : next_tokens(words, prefix)) {
    Word child = prefix;
    child.push_back(t);
    const auto [m, x] = aggregate_of(words, child);
    means.push_back(m);
    maxes.push_back(x);
  }
  if (const auto it = words.find(prefix); it != words.end()) {
    means.push_back(it->second.mean);
    maxes.push_back(it->second.max);
  }
  if (means.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double m : means) sum += m;
  return {sum / static_cast<double>(means.size()), *std::max_element(maxes.begin(), maxes.end())};
}

// Same as aggregate_of for every node under `prefix`, in one pass.
std::pair<double, double> aggregate_all(const std::map<Word, TerminalValue>& words,
                                        Word& prefix,
                                        std::map<Word, std::pair<double, double>>& out) {
  std::vector<double> means;
  std::vector<double> maxes;
  for (TokenId t : next_tokens(words, prefix)) {
    prefix.push_back(t);
    const auto [m, x] = aggregate_all(words, prefix, out);
    prefix.pop_back();
    means.push_back(m);
    maxes.push_back(x);
  }
  if (const auto it = words.find(prefix); it != words.end()) {
    means.push_back(it->second.mean);
    maxes.push_back(it->second.max);
  }
  std::pair<double, double> result{0.0, 0.0};
  if (!means.empty()) {
    double sum = 0.0;
    for (double m : means) sum += m;
    result = {sum / static_cast<double>(means.size()),
              *std::max_element(maxes.begin(), maxes.end())};
  }
  out.emplace(prefix, result);
  return result;
}

void collect(NodeView node, Word& prefix, std::map<Word, NodeView>& out) {
  out.emplace(prefix, node);
  for (std::size_t i = 0; i < node.child_count(); ++i) {
    prefix.push_back(node.child_token(i));
    collect(node.child_at(i), prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

void ReferenceStore::build(const std::vector<BidwordEntry>& entries) {
  words_.clear();
  for (const auto& e : entries) words_[e.tokens] = TerminalValue{e.ecpm, e.ecpm};
}

void ReferenceStore::update(const Word& tokens, double ecpm, const UpdateParams& params) {
  auto it = words_.find(tokens);
  if (it == words_.end()) {
    words_[tokens] = TerminalValue{ecpm, ecpm};
    return;
  }
  it->second.mean = params.alpha_u * ecpm + params.beta_u * it->second.mean;
  it->second.max = std::max(ecpm, it->second.max);
}

bool ReferenceStore::remove(const Word& tokens) { return words_.erase(tokens) > 0; }

std::pair<double, double> ReferenceStore::aggregate(const Word& prefix) const {
  return aggregate_of(words_, prefix);
}

std::vector<Word> ReferenceStore::all_prefixes() const {
  std::set<Word> out{Word{}};
  for (const auto& [w, v] : words_) {
    for (std::size_t n = 1; n <= w.size(); ++n) out.insert(Word(w.begin(), w.begin() + n));
  }
  return {out.begin(), out.end()};
}

std::optional<Mismatch> compare_to_reference(const WeightedTrie& trie,
                                             const ReferenceStore& reference,
                                             double rel_tol) {
  std::map<Word, NodeView> nodes;
  Word prefix;
  collect(trie.root(), prefix, nodes);

  const auto expected = reference.all_prefixes();
  std::map<Word, std::pair<double, double>> aggregates;
  Word scratch;
  aggregate_all(reference.words(), scratch, aggregates);
  if (nodes.size() != expected.size()) {
    return Mismatch{"trie has " + std::to_string(nodes.size()) + " nodes, expected " +
                    std::to_string(expected.size())};
  }
  if (trie.bidword_count() != reference.words().size()) {
    return Mismatch{"bidword count " + std::to_string(trie.bidword_count()) + ", expected " +
                    std::to_string(reference.words().size())};
  }
  for (const auto& p : expected) {
    const auto it = nodes.find(p);
    if (it == nodes.end()) return Mismatch{"missing node " + show(p)};
    const NodeView node = it->second;
    const auto word = reference.words().find(p);
    const bool is_word = word != reference.words().end();
    if (node.is_word() != is_word) return Mismatch{"is_word differs at " + show(p)};
    if (is_word) {
      const auto t = *node.terminal();
      if (!close(t.mean, word->second.mean, rel_tol) || !close(t.max, word->second.max, rel_tol)) {
        return Mismatch{"terminal differs at " + show(p)};
      }
    }
    const auto [mean, max] = aggregates.at(p);
    if (!close(node.mean(), mean, rel_tol) || !close(node.max(), max, rel_tol)) {
      std::ostringstream os;
      os << "aggregate differs at " << show(p) << ": got (" << node.mean() << ", " << node.max()
         << "), expected (" << mean << ", " << max << ")";
      return Mismatch{os.str()};
    }
    if (node.max() + 1e-12 < node.mean()) return Mismatch{"max < mean at " + show(p)};
  }
  return std::nullopt;
}

std::vector<double> reference_step(const std::vector<double>& p_llm,
                                   const std::vector<double>& values, double theta) {
  const std::size_t n = p_llm.size();
  double top = values[0];
  for (double v : values) top = std::max(top, v);
  std::vector<double> soft(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    soft[i] = std::exp(values[i] - top);
    z += soft[i];
  }
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = p_llm[i] * (1.0 + (soft[i] / z) * theta);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<EnumeratedWord> enumerate_adjusted(const std::map<Word, TerminalValue>& words,
                                               const std::string& query,
                                               const TokenScorer& scorer,
                                               const ThetaSchedule& theta,
                                               const ValueMix& mix) {
  std::vector<EnumeratedWord> out;
  for (const auto& [word, terminal] : words) {
    double log_score = 0.0;
    for (std::size_t i = 0; i <= word.size(); ++i) {
      const Word prefix(word.begin(), word.begin() + i);
      const auto next = next_tokens(words, prefix);
      const bool ends_here = i == word.size();
      if (ends_here && next.empty()) break;  // leaf: no decision left

      const auto full = scorer.next_distribution(query, prefix);
      std::vector<double> p;
      std::vector<double> values;
      std::size_t chosen = 0;
      for (TokenId t : next) {
        Word child = prefix;
        child.push_back(t);
        const auto [m, x] = aggregate_of(words, child);
        if (!ends_here && t == word[i]) chosen = p.size();
        p.push_back(full[t]);
        values.push_back(mix.alpha_v * m + mix.beta_v * x);
      }
      if (const auto it = words.find(prefix); it != words.end()) {
        if (ends_here) chosen = p.size();
        p.push_back(full[scorer.end_of_sequence()]);
        values.push_back(mix.alpha_v * it->second.mean + mix.beta_v * it->second.max);
      }
      const auto step = reference_step(p, values, theta.at(i + 1));
      log_score += std::log(step[chosen]);
      if (ends_here) break;
    }
    out.push_back({word, log_score, std::exp(log_score)});
  }
  std::sort(out.begin(), out.end(), [](const EnumeratedWord& a, const EnumeratedWord& b) {
    if (a.log_score != b.log_score) return a.log_score > b.log_score;
    return a.tokens < b.tokens;
  });
  return out;
}

}  // namespace valuedec::testing
