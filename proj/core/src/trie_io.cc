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

// Trie file layout (all integers little-endian, floats IEEE-754 binary64):
//
//   "WTRIE"            5 bytes magic
//   version            u8, currently 1
//   node_count         u64
//   bidword_count      u64
//   root node record, followed depth-first by its subtree
//
// Node record:
//   flags              u8, bit 0 = is_word, other bits zero
//   mean, max          f64, f64
//   word_mean, word_max  f64, f64 (present only when is_word)
//   child_count        u32
//   child_count times: token u32, then that child's node record
//
// Children appear in strictly increasing token order.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <utility>

#include "binary_io.h"
#include "valuedec/error.h"
#include "valuedec/io.h"
#include "valuedec/trie.h"

namespace valuedec {
namespace {

constexpr std::string_view kMagic = "WTRIE";
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kWordFlag = 0x1;

}  // namespace

void WeightedTrie::save(std::ostream& out) const {
  internal::BinaryWriter w(out);
  w.bytes(kMagic);
  w.u8(kVersion);
  w.u64(node_count());
  w.u64(word_count_);

  auto write_node = [&](NodeId id) {
    const Node& n = nodes_[id];
    w.u8(n.is_word ? kWordFlag : 0);
    w.f64(n.mean);
    w.f64(n.max);
    if (n.is_word) {
      w.f64(n.word_mean);
      w.f64(n.word_max);
    }
    w.u32(static_cast<std::uint32_t>(n.children.size()));
  };

  std::vector<std::pair<NodeId, std::size_t>> stack;
  write_node(kRoot);
  stack.emplace_back(kRoot, 0);
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const Node& n = nodes_[id];
    if (next == n.children.size()) {
      stack.pop_back();
      continue;
    }
    const TokenId token = n.children[next].token;
    const NodeId child = n.child_nodes[next];
    ++next;
    w.u32(token);
    write_node(child);
    stack.emplace_back(child, 0);
  }
  if (!out) throw IoError("failed writing trie");
}

WeightedTrie WeightedTrie::load(std::istream& in) {
  internal::BinaryReader r(in, "trie");
  if (r.bytes(kMagic.size()) != kMagic) r.fail("bad magic");
  if (const auto version = r.u8(); version != kVersion) {
    r.fail("unsupported version " + std::to_string(version));
  }
  const std::uint64_t node_count = r.u64();
  const std::uint64_t word_count = r.u64();
  if (node_count == 0 || node_count >= kNoNode) r.fail("bad node count");

  WeightedTrie trie;
  trie.nodes_.clear();
  trie.nodes_.reserve(std::min<std::uint64_t>(node_count, 1u << 22));

  auto check_value = [&](double v) {
    if (!std::isfinite(v) || v < 0.0) r.fail("invalid value");
  };
  // Reads one record into a fresh slot and returns its announced child count.
  auto read_node = [&](NodeId id) -> std::uint32_t {
    const std::uint8_t flags = r.u8();
    if ((flags & ~kWordFlag) != 0) r.fail("unknown node flags");
    Node& n = trie.nodes_[id];
    n.is_word = (flags & kWordFlag) != 0;
    n.mean = r.f64();
    n.max = r.f64();
    check_value(n.mean);
    check_value(n.max);
    if (n.is_word) {
      n.word_mean = r.f64();
      n.word_max = r.f64();
      check_value(n.word_mean);
      check_value(n.word_max);
      ++trie.word_count_;
    }
    return r.u32();
  };

  trie.nodes_.emplace_back();
  std::vector<std::pair<NodeId, std::uint32_t>> stack;
  stack.emplace_back(kRoot, read_node(kRoot));
  if (trie.nodes_[kRoot].is_word) r.fail("root cannot end a bidword");
  while (!stack.empty()) {
    auto& [parent, remaining] = stack.back();
    if (remaining == 0) {
      const Node& n = trie.nodes_[parent];
      if (parent != kRoot && !n.is_word && n.children.empty()) {
        r.fail("dangling non-word leaf");
      }
      stack.pop_back();
      continue;
    }
    --remaining;
    const TokenId token = r.u32();
    const NodeId parent_id = parent;
    const auto& siblings = trie.nodes_[parent_id].children;
    if (!siblings.empty() && siblings.back().token >= token) {
      r.fail("children out of order");
    }
    if (token == kNoNode) r.fail("token id out of range");
    if (trie.nodes_.size() >= node_count) r.fail("more nodes than announced");
    const auto child = static_cast<NodeId>(trie.nodes_.size());
    trie.nodes_[parent_id].children.push_back(ChildValue{token, 0.0, 0.0});
    trie.nodes_[parent_id].child_nodes.push_back(child);
    trie.nodes_.emplace_back();
    trie.token_bound_ = std::max(trie.token_bound_, token + 1);
    const std::uint32_t child_count = read_node(child);
    stack.emplace_back(child, child_count);
  }
  if (trie.nodes_.size() != node_count) r.fail("node count mismatch");
  if (trie.word_count_ != word_count) r.fail("bidword count mismatch");
  if (!r.at_end()) r.fail("trailing bytes");
  // Stored aggregates must be exactly what the terminals produce.
  std::vector<std::pair<double, double>> stored;
  stored.reserve(trie.nodes_.size());
  for (const Node& n : trie.nodes_) stored.emplace_back(n.mean, n.max);
  trie.recompute_all();
  for (std::size_t i = 0; i < stored.size(); ++i) {
    if (stored[i].first != trie.nodes_[i].mean ||
        stored[i].second != trie.nodes_[i].max) {
      r.fail("stored aggregates disagree with terminal values");
    }
  }
  return trie;
}

void WeightedTrie::save(const std::filesystem::path& path) const {
  write_atomically(path, [this](std::ostream& out) { save(out); });
}

WeightedTrie WeightedTrie::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load(in);
}

}  // namespace valuedec
