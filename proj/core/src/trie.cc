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

#include "valuedec/trie.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "valuedec/error.h"

namespace valuedec {

void UpdateParams::validate() const {
  if (!(alpha_u >= 0.0 && alpha_u <= 1.0 && beta_u >= 0.0 && beta_u <= 1.0)) {
    throw InvalidArgument("alpha_u and beta_u must lie in [0, 1]");
  }
  if (std::abs(alpha_u + beta_u - 1.0) > 1e-9) {
    throw InvalidArgument("alpha_u + beta_u must equal 1");
  }
}

void check_ecpm(double ecpm) {
  if (!std::isfinite(ecpm) || ecpm < 0.0) {
    throw InvalidArgument("eCPM must be finite and non-negative, got " +
                          std::to_string(ecpm));
  }
}

// --- NodeView ---------------------------------------------------------------

double NodeView::mean() const { return trie_->nodes_[id_].mean; }
double NodeView::max() const { return trie_->nodes_[id_].max; }
bool NodeView::is_word() const { return trie_->nodes_[id_].is_word; }

std::optional<TerminalValue> NodeView::terminal() const {
  const auto& n = trie_->nodes_[id_];
  if (!n.is_word) return std::nullopt;
  return TerminalValue{n.word_mean, n.word_max};
}

std::size_t NodeView::child_count() const {
  return trie_->nodes_[id_].children.size();
}

TokenId NodeView::child_token(std::size_t i) const {
  return trie_->nodes_[id_].children[i].token;
}

NodeView NodeView::child_at(std::size_t i) const {
  return NodeView(trie_, trie_->nodes_[id_].child_nodes[i]);
}

ChildValue NodeView::child_value(std::size_t i) const {
  return trie_->nodes_[id_].children[i];
}

std::span<const ChildValue> NodeView::child_values() const {
  return trie_->nodes_[id_].children;
}

std::optional<NodeView> NodeView::child(TokenId token) const {
  const auto id = trie_->find_child(id_, token);
  if (id == WeightedTrie::kNoNode) return std::nullopt;
  return NodeView(trie_, id);
}

std::optional<ChildValue> ChildrenValues::find(TokenId token) const {
  auto it = std::lower_bound(
      values_.begin(), values_.end(), token,
      [](const ChildValue& c, TokenId t) { return c.token < t; });
  if (it == values_.end() || it->token != token) return std::nullopt;
  return *it;
}

// --- WeightedTrie -----------------------------------------------------------

WeightedTrie::WeightedTrie() { nodes_.emplace_back(); }

WeightedTrie::NodeId WeightedTrie::allocate() {
  if (!free_.empty()) {
    const NodeId id = free_.back();
    free_.pop_back();
    nodes_[id] = Node{};
    return id;
  }
  if (nodes_.size() >= kNoNode) throw InvalidArgument("trie node limit reached");
  nodes_.emplace_back();
  return static_cast<NodeId>(nodes_.size() - 1);
}

WeightedTrie::NodeId WeightedTrie::find_child(NodeId parent,
                                              TokenId token) const {
  const auto& n = nodes_[parent];
  auto it = std::lower_bound(
      n.children.begin(), n.children.end(), token,
      [](const ChildValue& c, TokenId t) { return c.token < t; });
  if (it == n.children.end() || it->token != token) return kNoNode;
  return n.child_nodes[it - n.children.begin()];
}

WeightedTrie::NodeId WeightedTrie::child_or_insert(NodeId parent,
                                                   TokenId token) {
  if (token == kNoNode) throw InvalidArgument("token id out of range");
  if (const NodeId found = find_child(parent, token); found != kNoNode) {
    return found;
  }
  // allocate() may reallocate nodes_, so look the slot up again afterwards.
  const NodeId child = allocate();
  Node& n = nodes_[parent];
  auto it = std::lower_bound(
      n.children.begin(), n.children.end(), token,
      [](const ChildValue& c, TokenId t) { return c.token < t; });
  const auto pos = it - n.children.begin();
  n.children.insert(it, ChildValue{token, 0.0, 0.0});
  n.child_nodes.insert(n.child_nodes.begin() + pos, child);
  if (token >= token_bound_) token_bound_ = token + 1;
  return child;
}

void WeightedTrie::aggregate(NodeId id) {
  Node& n = nodes_[id];
  double sum = 0.0;
  double best = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    const Node& c = nodes_[n.child_nodes[i]];
    n.children[i].mean = c.mean;
    n.children[i].max = c.max;
    sum += c.mean;
    best = std::max(best, c.max);
    ++count;
  }
  if (n.is_word) {
    sum += n.word_mean;
    best = std::max(best, n.word_max);
    ++count;
  }
  n.mean = count == 0 ? 0.0 : sum / static_cast<double>(count);
  n.max = best;
}

WeightedTrie WeightedTrie::build(std::span<const BidwordEntry> entries) {
  if (entries.empty()) throw InvalidArgument("cannot build a trie from no entries");
  WeightedTrie trie;
  for (const auto& entry : entries) {
    if (entry.tokens.empty()) {
      throw InvalidArgument("bidword '" + entry.text + "' has no tokens");
    }
    check_ecpm(entry.ecpm);
    NodeId node = kRoot;
    for (TokenId t : entry.tokens) node = trie.child_or_insert(node, t);
    Node& leaf = trie.nodes_[node];
    if (!leaf.is_word) ++trie.word_count_;
    leaf.is_word = true;
    leaf.word_mean = entry.ecpm;
    leaf.word_max = entry.ecpm;
  }
  trie.recompute_all();
  return trie;
}

void WeightedTrie::recompute_all() {
  // Iterative post-order: a node is aggregated once all its children are.
  std::vector<std::pair<NodeId, std::size_t>> stack;
  stack.emplace_back(kRoot, 0);
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const auto& children = nodes_[id].child_nodes;
    if (next < children.size()) {
      const NodeId child = children[next];
      ++next;
      stack.emplace_back(child, 0);
    } else {
      aggregate(id);
      stack.pop_back();
    }
  }
}

void WeightedTrie::momentum_update(std::span<const TokenId> tokens,
                                   double ecpm_new,
                                   const UpdateParams& params) {
  if (tokens.empty()) throw InvalidArgument("momentum update needs tokens");
  check_ecpm(ecpm_new);
  params.validate();

  std::vector<NodeId> path;
  path.reserve(tokens.size() + 1);
  path.push_back(kRoot);
  for (TokenId t : tokens) path.push_back(child_or_insert(path.back(), t));

  Node& term = nodes_[path.back()];
  if (term.is_word) {
    term.word_max = std::max(ecpm_new, term.word_max);
    term.word_mean = params.alpha_u * ecpm_new + params.beta_u * term.word_mean;
  } else {
    term.is_word = true;
    term.word_mean = ecpm_new;
    term.word_max = ecpm_new;
    ++word_count_;
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) aggregate(*it);
}

bool WeightedTrie::remove(std::span<const TokenId> tokens) {
  if (tokens.empty()) return false;
  std::vector<NodeId> path;
  path.reserve(tokens.size() + 1);
  path.push_back(kRoot);
  for (TokenId t : tokens) {
    const NodeId next = find_child(path.back(), t);
    if (next == kNoNode) return false;
    path.push_back(next);
  }
  Node& term = nodes_[path.back()];
  if (!term.is_word) return false;
  term.is_word = false;
  term.word_mean = 0.0;
  term.word_max = 0.0;
  --word_count_;

  bool pruned_bound_token = false;
  std::size_t depth = tokens.size();
  // Walk upwards pruning nodes that neither end a word nor lead to one.
  while (depth > 0) {
    const NodeId id = path[depth];
    const Node& n = nodes_[id];
    if (n.is_word || !n.children.empty()) break;
    Node& parent = nodes_[path[depth - 1]];
    const TokenId token = tokens[depth - 1];
    auto it = std::lower_bound(
        parent.children.begin(), parent.children.end(), token,
        [](const ChildValue& c, TokenId t) { return c.token < t; });
    parent.child_nodes.erase(parent.child_nodes.begin() +
                             (it - parent.children.begin()));
    parent.children.erase(it);
    nodes_[id] = Node{};
    free_.push_back(id);
    if (token + 1 == token_bound_) pruned_bound_token = true;
    --depth;
  }
  for (std::size_t d = depth + 1; d-- > 0;) aggregate(path[d]);
  if (pruned_bound_token) recompute_token_bound();
  if (word_count_ == 0) {
    nodes_.assign(1, Node{});
    free_.clear();
    token_bound_ = 0;
  }
  return true;
}

void WeightedTrie::recompute_token_bound() {
  TokenId bound = 0;
  std::vector<NodeId> stack{kRoot};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      bound = std::max(bound, n.children[i].token + 1);
      stack.push_back(n.child_nodes[i]);
    }
  }
  token_bound_ = bound;
}

std::optional<NodeView> WeightedTrie::find(
    std::span<const TokenId> prefix) const {
  NodeId node = kRoot;
  for (TokenId t : prefix) {
    node = find_child(node, t);
    if (node == kNoNode) return std::nullopt;
  }
  return NodeView(this, node);
}

bool WeightedTrie::contains(std::span<const TokenId> tokens) const {
  if (tokens.empty()) return false;
  auto node = find(tokens);
  return node && node->is_word();
}

ChildrenValues WeightedTrie::children_values(
    std::span<const TokenId> prefix) const {
  auto node = find(prefix);
  if (!node) return ChildrenValues();
  return ChildrenValues(*node);
}

TrieStats WeightedTrie::stats() const {
  TrieStats s;
  s.node_count = node_count();
  s.bidword_count = word_count_;
  for_each_bidword([&](std::span<const TokenId> tokens, TerminalValue) {
    if (s.depth_histogram.size() <= tokens.size()) {
      s.depth_histogram.resize(tokens.size() + 1, 0);
    }
    ++s.depth_histogram[tokens.size()];
    s.max_depth = std::max(s.max_depth, tokens.size());
  });
  return s;
}

void WeightedTrie::for_each_bidword(
    const std::function<void(std::span<const TokenId>, TerminalValue)>& fn)
    const {
  std::vector<TokenId> prefix;
  std::vector<std::pair<NodeId, std::size_t>> stack;
  stack.emplace_back(kRoot, 0);
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const Node& n = nodes_[id];
    if (next == 0 && n.is_word) fn(prefix, TerminalValue{n.word_mean, n.word_max});
    if (next < n.children.size()) {
      const TokenId token = n.children[next].token;
      const NodeId child = n.child_nodes[next];
      ++next;
      prefix.push_back(token);
      stack.emplace_back(child, 0);
    } else {
      stack.pop_back();
      if (!prefix.empty() && !stack.empty()) prefix.pop_back();
    }
  }
}

bool operator==(const WeightedTrie& a, const WeightedTrie& b) {
  if (a.word_count_ != b.word_count_ || a.node_count() != b.node_count()) {
    return false;
  }
  using NodeId = WeightedTrie::NodeId;
  std::vector<std::pair<NodeId, NodeId>> stack;
  stack.emplace_back(WeightedTrie::kRoot, WeightedTrie::kRoot);
  while (!stack.empty()) {
    const auto [ia, ib] = stack.back();
    stack.pop_back();
    const auto& na = a.nodes_[ia];
    const auto& nb = b.nodes_[ib];
    if (na.is_word != nb.is_word || na.mean != nb.mean || na.max != nb.max ||
        na.children.size() != nb.children.size()) {
      return false;
    }
    if (na.is_word &&
        (na.word_mean != nb.word_mean || na.word_max != nb.word_max)) {
      return false;
    }
    for (std::size_t i = 0; i < na.children.size(); ++i) {
      if (na.children[i].token != nb.children[i].token) return false;
      stack.emplace_back(na.child_nodes[i], nb.child_nodes[i]);
    }
  }
  return true;
}

// --- TrieStore --------------------------------------------------------------

TrieStore::TrieStore(WeightedTrie trie)
    : current_(std::make_shared<const WeightedTrie>(std::move(trie))) {}

std::shared_ptr<const WeightedTrie> TrieStore::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void TrieStore::publish(WeightedTrie trie) {
  auto next = std::make_shared<const WeightedTrie>(std::move(trie));
  std::lock_guard lock(snapshot_mutex_);
  current_.swap(next);
}

void TrieStore::modify(const std::function<void(WeightedTrie&)>& fn) {
  std::lock_guard writer(writer_mutex_);
  WeightedTrie next = *snapshot();
  fn(next);
  publish(std::move(next));
}

}  // namespace valuedec
