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

#ifndef VALUEDEC_TRIE_H_
#define VALUEDEC_TRIE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "valuedec/tokenizer.h"

namespace valuedec {

struct BidwordEntry {
  std::vector<TokenId> tokens;
  double ecpm = 0.0;
  std::string text;
};

// Momentum rates for terminal refreshes. alpha_u weighs the incoming eCPM,
// beta_u the stored one; they must sum to 1.
struct UpdateParams {
  double alpha_u = 0.5;
  double beta_u = 0.5;

  void validate() const;
};

// Throws InvalidArgument unless `ecpm` is finite and non-negative.
void check_ecpm(double ecpm);

struct ChildValue {
  TokenId token;
  double mean;
  double max;
};

// Terminal value of a bidword node. `mean` is the momentum-smoothed side,
// `max` the running maximum; both enter the node's aggregates as if they
// belonged to an extra child.
struct TerminalValue {
  double mean;
  double max;
};

struct TrieStats {
  std::size_t node_count = 0;
  std::size_t bidword_count = 0;
  std::size_t max_depth = 0;
  // depth_histogram[d] = number of bidwords with d tokens.
  std::vector<std::size_t> depth_histogram;
};

class WeightedTrie;

// Non-owning handle on a trie node. Valid until the trie is mutated.
class NodeView {
 public:
  NodeView(const WeightedTrie* trie, std::uint32_t id) : trie_(trie), id_(id) {}

  double mean() const;
  double max() const;
  bool is_word() const;
  std::optional<TerminalValue> terminal() const;

  std::size_t child_count() const;
  TokenId child_token(std::size_t i) const;
  NodeView child_at(std::size_t i) const;
  ChildValue child_value(std::size_t i) const;
  // Contiguous child aggregates, sorted by token.
  std::span<const ChildValue> child_values() const;
  std::optional<NodeView> child(TokenId token) const;

  std::uint32_t id() const noexcept { return id_; }

 private:
  const WeightedTrie* trie_;
  std::uint32_t id_;
};

// Child aggregates of the node reached by a prefix. Empty (no children, no
// terminal) when the prefix is not in the trie.
class ChildrenValues {
 public:
  using Iterator = const ChildValue*;

  ChildrenValues() = default;
  explicit ChildrenValues(NodeView node)
      : node_(node), values_(node.child_values()) {}

  bool found() const noexcept { return node_.has_value(); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const { return size() == 0; }
  std::optional<TerminalValue> terminal() const {
    return node_ ? node_->terminal() : std::nullopt;
  }
  std::optional<ChildValue> find(TokenId token) const;
  const ChildValue& operator[](std::size_t i) const { return values_[i]; }

  Iterator begin() const noexcept { return values_.data(); }
  Iterator end() const noexcept { return values_.data() + values_.size(); }

  const std::optional<NodeView>& node() const noexcept { return node_; }

 private:
  std::optional<NodeView> node_;
  std::span<const ChildValue> values_;
};

// Prefix tree over token sequences whose nodes carry mean/max aggregates of
// the eCPM values stored below them.
//
// Aggregation rule, applied bottom-up:
//   max  = max  over {child.max}  U {terminal.max  if is_word}
//   mean = mean over {child.mean} U {terminal.mean if is_word}
// The mean is unweighted by subtree size. An empty node aggregates to 0.
//
// Not internally synchronized: concurrent const access is safe, mutation
// requires exclusivity. TrieStore provides snapshot publication on top.
class WeightedTrie {
 public:
  WeightedTrie();

  // Inserts every entry (later duplicates overwrite earlier ones) and then
  // runs one post-order aggregation pass. Throws InvalidArgument on an empty
  // list, an empty token sequence or an invalid eCPM.
  static WeightedTrie build(std::span<const BidwordEntry> entries);

  // Refreshes a bidword's terminal with a new eCPM observation:
  //   terminal.max  <- max(ecpm_new, terminal.max)
  //   terminal.mean <- alpha_u * ecpm_new + beta_u * terminal.mean
  // A bidword not yet stored is created with both sides set to ecpm_new.
  // Ancestors on the path are re-aggregated from their children.
  void momentum_update(std::span<const TokenId> tokens, double ecpm_new,
                       const UpdateParams& params);

  // Clears the terminal flag, prunes nodes left without purpose and
  // re-aggregates the path. Returns whether the bidword was present.
  bool remove(std::span<const TokenId> tokens);

  bool contains(std::span<const TokenId> tokens) const;
  ChildrenValues children_values(std::span<const TokenId> prefix) const;
  std::optional<NodeView> find(std::span<const TokenId> prefix) const;

  NodeView root() const { return NodeView(this, kRoot); }
  bool empty() const noexcept { return word_count_ == 0; }
  std::size_t bidword_count() const noexcept { return word_count_; }
  std::size_t node_count() const noexcept {
    return nodes_.size() - free_.size();
  }
  // One past the largest token id on any edge; 0 for an empty trie.
  TokenId token_bound() const noexcept { return token_bound_; }

  // Full post-order re-aggregation. Idempotent.
  void recompute_all();

  TrieStats stats() const;

  // Visits every stored bidword in lexicographic token order.
  void for_each_bidword(
      const std::function<void(std::span<const TokenId>, TerminalValue)>& fn)
      const;

  // Binary format: see docs/trie_format.md.
  void save(std::ostream& out) const;
  static WeightedTrie load(std::istream& in);
  // Writes to a sibling temporary file and renames it into place.
  void save(const std::filesystem::path& path) const;
  static WeightedTrie load(const std::filesystem::path& path);

  // Same shape, flags and bit-identical values.
  friend bool operator==(const WeightedTrie& a, const WeightedTrie& b);

 private:
  friend class NodeView;

  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;

  struct Node {
    double mean = 0.0;
    double max = 0.0;
    double word_mean = 0.0;
    double word_max = 0.0;
    // Sorted by token. Each entry caches the child's aggregates so reading
    // all children touches one array; refreshed by aggregate(parent).
    std::vector<ChildValue> children;
    std::vector<NodeId> child_nodes;  // parallel to children
    bool is_word = false;
  };

  NodeId allocate();
  NodeId find_child(NodeId parent, TokenId token) const;
  NodeId child_or_insert(NodeId parent, TokenId token);
  void aggregate(NodeId id);
  void recompute_token_bound();

  static constexpr NodeId kNoNode = ~NodeId{0};

  std::vector<Node> nodes_;
  std::vector<NodeId> free_;
  std::size_t word_count_ = 0;
  TokenId token_bound_ = 0;
};

// Publishes immutable trie snapshots to readers while one writer at a time
// prepares the next version. Readers holding a snapshot never observe a
// partially applied update.
class TrieStore {
 public:
  explicit TrieStore(WeightedTrie trie = WeightedTrie());

  std::shared_ptr<const WeightedTrie> snapshot() const;
  void publish(WeightedTrie trie);

  // Copies the current snapshot, applies `fn` to the copy and publishes it.
  // Writers are serialized; readers continue on the old snapshot meanwhile.
  void modify(const std::function<void(WeightedTrie&)>& fn);

 private:
  mutable std::mutex snapshot_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const WeightedTrie> current_;
};

}  // namespace valuedec

#endif  // VALUEDEC_TRIE_H_
