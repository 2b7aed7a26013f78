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

#include "valuedec/decoder.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "log.h"
#include "valuedec/error.h"

namespace valuedec {
namespace {

constexpr double kDeadFloor = 1e-12;

double parse_real(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InvalidArgument("bad " + std::string(what) + " '" +
                          std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_non_negative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidArgument(std::string(what) + " must be finite and >= 0");
  }
}

// A partial path through the trie during beam search.
struct Hypothesis {
  std::uint32_t node;
  std::vector<TokenId> tokens;
  double log_llm;
  double log_adjusted;
};

struct Expansion {
  std::size_t parent;
  TokenId symbol;
  std::uint32_t node;  // child node, unused for kEndOfWord
  bool finished;
  double log_llm;
  double log_adjusted;
  double word_value;
};

bool lex_less(std::span<const TokenId> a, TokenId a_last,
              std::span<const TokenId> b, TokenId b_last) {
  // Compares a + [a_last] with b + [b_last]; kEndOfWord means "no last token".
  const std::size_t na = a.size() + (a_last != kEndOfWord);
  const std::size_t nb = b.size() + (b_last != kEndOfWord);
  const std::size_t n = std::min(na, nb);
  for (std::size_t i = 0; i < n; ++i) {
    const TokenId x = i < a.size() ? a[i] : a_last;
    const TokenId y = i < b.size() ? b[i] : b_last;
    if (x != y) return x < y;
  }
  return na < nb;
}

// Evaluates the adjusted step distribution at `node` after `prefix`.
class StepEvaluator {
 public:
  StepEvaluator(std::string_view query, const WeightedTrie& trie,
                const TokenScorer& scorer, const DecodeConfig& config)
      : query_(query), trie_(trie), scorer_(scorer), config_(config) {}

  // Throws DeadPrefixError on a dead prefix unless `floor_dead`.
  AdjustedStep evaluate(std::uint32_t node_id, std::span<const TokenId> prefix,
                        bool floor_dead) {
    NodeView node(&trie_, node_id);
    candidates_ = step_candidates(ChildrenValues(node));
    scorer_tokens_.resize(candidates_.size());
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      const TokenId s = candidates_[i].symbol;
      scorer_tokens_[i] = s == kEndOfWord ? scorer_.end_of_sequence() : s;
    }
    p_llm_.resize(candidates_.size());
    scorer_.probabilities(query_, prefix, scorer_tokens_, p_llm_);
    const double theta = config_.theta.at(prefix.size() + 1);
    return adjust_step(candidates_, p_llm_, theta, config_.value_mix,
                       config_.value_temperature, floor_dead);
  }

  // Raw scorer probability of candidates_[i] from the last evaluate().
  double llm(std::size_t i) const { return p_llm_[i]; }

 private:
  std::string_view query_;
  const WeightedTrie& trie_;
  const TokenScorer& scorer_;
  const DecodeConfig& config_;
  std::vector<StepCandidate> candidates_;
  std::vector<TokenId> scorer_tokens_;
  std::vector<double> p_llm_;
};

double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

std::vector<Candidate> beam_search(std::string_view query,
                                   const WeightedTrie& trie,
                                   const TokenScorer& scorer,
                                   const DecodeConfig& config,
                                   std::size_t width, std::size_t k) {
  StepEvaluator evaluator(query, trie, scorer, config);
  std::vector<Hypothesis> live;
  live.push_back({trie.root().id(), {}, 0.0, 0.0});
  std::vector<Candidate> finished;
  std::vector<Expansion> expansions;

  auto kth_finished_score = [&]() {
    // finished is kept sorted best-first
    return finished.size() >= k ? finished[k - 1].log_score_adjusted
                                : -std::numeric_limits<double>::infinity();
  };

  for (std::size_t depth = 1; depth <= config.max_depth && !live.empty();
       ++depth) {
    expansions.clear();
    for (std::size_t h = 0; h < live.size(); ++h) {
      const Hypothesis& hyp = live[h];
      AdjustedStep step;
      try {
        step = evaluator.evaluate(hyp.node, hyp.tokens, !config.strict);
      } catch (const DeadPrefixError&) {
        if (config.strict) throw;
        continue;
      }
      NodeView node(&trie, hyp.node);
      for (std::size_t i = 0; i < step.symbols.size(); ++i) {
        const double p = step.probabilities[i];
        if (!(p > 0.0)) continue;  // never emit zero-probability paths
        Expansion e;
        e.parent = h;
        e.symbol = step.symbols[i];
        e.log_llm = hyp.log_llm + safe_log(evaluator.llm(i));
        e.log_adjusted = hyp.log_adjusted + std::log(p);
        if (e.symbol == kEndOfWord) {
          e.node = hyp.node;
          e.finished = true;
          e.word_value = node.terminal()->mean;
        } else {
          const NodeView child = *node.child(e.symbol);
          e.node = child.id();
          // A childless node is a complete bidword with nothing left to choose.
          e.finished = child.child_count() == 0;
          e.word_value = e.finished ? child.terminal()->mean : 0.0;
        }
        expansions.push_back(e);
      }
    }

    auto better = [&](const Expansion& a, const Expansion& b) {
      if (a.log_adjusted != b.log_adjusted) return a.log_adjusted > b.log_adjusted;
      return lex_less(live[a.parent].tokens, a.symbol, live[b.parent].tokens,
                      b.symbol);
    };
    if (expansions.size() > width) {
      std::partial_sort(expansions.begin(), expansions.begin() + width,
                        expansions.end(), better);
      expansions.resize(width);
    } else {
      std::sort(expansions.begin(), expansions.end(), better);
    }

    std::vector<Hypothesis> next;
    next.reserve(expansions.size());
    for (const Expansion& e : expansions) {
      std::vector<TokenId> tokens = live[e.parent].tokens;
      if (e.symbol != kEndOfWord) tokens.push_back(e.symbol);
      if (e.finished) {
        finished.push_back(
            {std::move(tokens), e.log_llm, e.log_adjusted, e.word_value});
      } else {
        next.push_back({e.node, std::move(tokens), e.log_llm, e.log_adjusted});
      }
    }
    std::sort(finished.begin(), finished.end(), ranks_before);
    if (finished.size() > k) finished.resize(k);

    // Scores only decrease along a path, so a live hypothesis strictly below
    // the k-th finished candidate can never place.
    const double bar = kth_finished_score();
    std::erase_if(next, [&](const Hypothesis& h) { return h.log_adjusted < bar; });
    live = std::move(next);
  }
  if (!live.empty()) {
    internal::logger().warn("decode stopped at max_depth {} with {} live paths", config.max_depth,
              live.size());
  }
  return finished;
}

}  // namespace

// --- ThetaSchedule ------------------------------------------------------------

ThetaSchedule ThetaSchedule::zero() { return ThetaSchedule(); }

ThetaSchedule ThetaSchedule::constant(double c) {
  check_non_negative(c, "theta constant");
  ThetaSchedule s;
  s.kind_ = Kind::kConstant;
  s.a_ = c;
  return s;
}

ThetaSchedule ThetaSchedule::linear(double step) {
  check_non_negative(step, "theta step");
  ThetaSchedule s;
  s.kind_ = Kind::kLinear;
  s.a_ = step;
  return s;
}

ThetaSchedule ThetaSchedule::exponential(double base, double scale) {
  check_non_negative(base, "theta base");
  check_non_negative(scale, "theta scale");
  ThetaSchedule s;
  s.kind_ = Kind::kExponential;
  s.a_ = base;
  s.b_ = scale;
  return s;
}

ThetaSchedule ThetaSchedule::custom(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("custom theta list is empty");
  for (double v : values) check_non_negative(v, "theta value");
  ThetaSchedule s;
  s.kind_ = Kind::kCustom;
  s.values_ = std::move(values);
  return s;
}

ThetaSchedule ThetaSchedule::parse(std::string_view text) {
  if (text == "zero") return zero();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("bad theta schedule '" + std::string(text) + "'");
  }
  const auto head = text.substr(0, colon);
  const auto body = text.substr(colon + 1);
  if (head == "const") return constant(parse_real(body, "theta constant"));
  if (head == "linear") return linear(parse_real(body, "theta step"));
  if (head == "custom") return custom(parse_list(body, "theta value"));
  if (head == "exp") {
    const auto v = parse_list(body, "theta exponential");
    if (v.size() != 2) throw InvalidArgument("exp theta needs base,scale");
    return exponential(v[0], v[1]);
  }
  throw InvalidArgument("bad theta schedule '" + std::string(text) + "'");
}

std::string ThetaSchedule::to_string() const {
  switch (kind_) {
    case Kind::kZero:
      return "zero";
    case Kind::kConstant:
      return "const:" + format_real(a_);
    case Kind::kLinear:
      return "linear:" + format_real(a_);
    case Kind::kExponential:
      return "exp:" + format_real(a_) + "," + format_real(b_);
    case Kind::kCustom: {
      std::string out = "custom:";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) out += ",";
        out += format_real(values_[i]);
      }
      return out;
    }
  }
  return "zero";
}

double ThetaSchedule::at(std::size_t depth) const {
  if (depth == 0) throw InvalidArgument("theta depth starts at 1");
  switch (kind_) {
    case Kind::kZero:
      return 0.0;
    case Kind::kConstant:
      return a_;
    case Kind::kLinear:
      return a_ * static_cast<double>(depth);
    case Kind::kExponential:
      return b_ * std::pow(a_, static_cast<double>(depth - 1));
    case Kind::kCustom:
      return values_[std::min(depth, values_.size()) - 1];
  }
  return 0.0;
}

std::vector<NamedSchedule> reference_schedules() {
  return {{"theta1", ThetaSchedule::zero()},
          {"theta2", ThetaSchedule::constant(1.0)},
          {"theta3", ThetaSchedule::linear(1.0)},
          {"theta4", ThetaSchedule::exponential(2.0, 1.0)},
          {"theta5", ThetaSchedule::exponential(2.0, 2.0)}};
}

// --- ValueMix / DecodeConfig -------------------------------------------------

void ValueMix::validate() const {
  check_non_negative(alpha_v, "alpha_v");
  check_non_negative(beta_v, "beta_v");
  if (!(alpha_v + beta_v > 0.0)) {
    throw InvalidArgument("alpha_v + beta_v must be positive");
  }
}

double node_value(double mean, double max, const ValueMix& mix) {
  return mix.alpha_v * mean + mix.beta_v * max;
}

std::string to_string(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kGreedy:
      return "greedy";
    case DecodeMode::kBeam:
      return "beam";
    case DecodeMode::kSample:
      return "sample";
  }
  return "beam";
}

DecodeMode parse_decode_mode(std::string_view text) {
  if (text == "greedy") return DecodeMode::kGreedy;
  if (text == "beam") return DecodeMode::kBeam;
  if (text == "sample") return DecodeMode::kSample;
  throw InvalidArgument("unknown decode mode '" + std::string(text) + "'");
}

void DecodeConfig::validate() const {
  if (k == 0) throw InvalidArgument("k must be positive");
  if (beam_width == 0) throw InvalidArgument("beam width must be positive");
  if (mode == DecodeMode::kBeam && beam_width < k) {
    throw InvalidArgument("beam width " + std::to_string(beam_width) +
                          " is smaller than k " + std::to_string(k));
  }
  if (max_depth == 0) throw InvalidArgument("max_depth must be positive");
  value_mix.validate();
  if (!std::isfinite(value_temperature) || value_temperature <= 0.0) {
    throw InvalidArgument("value temperature must be positive");
  }
}

// --- Step distribution -------------------------------------------------------

AdjustedStep adjust_step(std::span<const StepCandidate> candidates,
                         std::span<const double> p_llm, double theta,
                         const ValueMix& mix, double temperature,
                         bool floor_dead) {
  if (candidates.empty()) throw InvalidArgument("empty candidate set");
  if (p_llm.size() != candidates.size()) {
    throw InvalidArgument("p_llm and candidate sizes differ");
  }
  const std::size_t n = candidates.size();
  AdjustedStep out;
  out.symbols.resize(n);
  out.probabilities.resize(n);

  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.symbols[i] = candidates[i].symbol;
    mass += p_llm[i];
  }
  const bool dead = !(mass > 0.0);
  if (dead && !floor_dead) throw DeadPrefixError("every legal continuation has zero probability");

  if (theta == 0.0) {
    // Plain masking; skips the value softmax entirely.
    for (std::size_t i = 0; i < n; ++i) {
      out.probabilities[i] = dead ? kDeadFloor : p_llm[i];
    }
  } else {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
      top = std::max(top, node_value(c.mean, c.max, mix) / temperature);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = node_value(candidates[i].mean, candidates[i].max, mix);
      out.probabilities[i] = std::exp(v / temperature - top);
      z += out.probabilities[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double p = dead ? kDeadFloor : p_llm[i];
      out.probabilities[i] = p * (1.0 + theta * (out.probabilities[i] / z));
    }
  }
  double total = 0.0;
  for (double p : out.probabilities) total += p;
  for (double& p : out.probabilities) p /= total;
  return out;
}

std::vector<StepCandidate> step_candidates(const ChildrenValues& children) {
  std::vector<StepCandidate> out;
  out.reserve(children.size() + 1);
  for (const ChildValue c : children) out.push_back({c.token, c.mean, c.max});
  if (!children.empty()) {
    if (const auto t = children.terminal()) {
      out.push_back({kEndOfWord, t->mean, t->max});
    }
  } else if (const auto t = children.terminal()) {
    // A childless bidword can only stop.
    out.push_back({kEndOfWord, t->mean, t->max});
  }
  return out;
}

AdjustedStep adjusted_distribution(std::span<const double> p_llm,
                                   const ChildrenValues& children,
                                   TokenId end_of_sequence, double theta,
                                   const ValueMix& mix, double temperature) {
  check_distribution(p_llm);
  const auto candidates = step_candidates(children);
  if (candidates.empty()) throw InvalidArgument("empty candidate set");
  std::vector<double> masked(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const TokenId t =
        candidates[i].symbol == kEndOfWord ? end_of_sequence : candidates[i].symbol;
    masked[i] = t < p_llm.size() ? p_llm[t] : 0.0;
  }
  return adjust_step(candidates, masked, theta, mix, temperature, false);
}

// --- Decoding ------------------------------------------------------------------

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.log_score_adjusted != b.log_score_adjusted) {
    return a.log_score_adjusted > b.log_score_adjusted;
  }
  return a.tokens < b.tokens;
}

void check_compatible(const WeightedTrie& trie, const TokenScorer& scorer) {
  if (trie.token_bound() > scorer.vocabulary_size()) {
    throw VocabularyMismatch("trie uses token ids up to " +
                             std::to_string(trie.token_bound() - 1) +
                             " but the scorer vocabulary has " +
                             std::to_string(scorer.vocabulary_size()) + " entries");
  }
  if (scorer.end_of_sequence() >= scorer.vocabulary_size()) {
    throw VocabularyMismatch("scorer end-of-sequence id out of range");
  }
}

std::vector<Candidate> decode_topk(std::string_view query,
                                   const WeightedTrie& trie,
                                   const TokenScorer& scorer,
                                   const DecodeConfig& config) {
  config.validate();
  if (trie.empty()) throw InvalidArgument("cannot decode from an empty trie");
  check_compatible(trie, scorer);

  switch (config.mode) {
    case DecodeMode::kGreedy:
      return beam_search(query, trie, scorer, config, 1, 1);
    case DecodeMode::kBeam:
      return beam_search(query, trie, scorer, config, config.beam_width, config.k);
    case DecodeMode::kSample:
      break;
  }

  SplitMix64 rng(config.seed);
  std::vector<Candidate> out;
  std::set<std::vector<TokenId>> seen;
  const std::size_t budget = std::max<std::size_t>(config.k * 20, 100);
  for (std::size_t draw = 0; draw < budget && out.size() < config.k; ++draw) {
    Candidate c = sample_one(query, trie, scorer, config, rng);
    if (seen.insert(c.tokens).second) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

Candidate sample_one(std::string_view query, const WeightedTrie& trie,
                     const TokenScorer& scorer, const DecodeConfig& config) {
  config.validate();
  if (trie.empty()) throw InvalidArgument("cannot sample from an empty trie");
  check_compatible(trie, scorer);
  SplitMix64 rng(config.seed);
  return sample_one(query, trie, scorer, config, rng);
}

Candidate sample_one(std::string_view query, const WeightedTrie& trie,
                     const TokenScorer& scorer, const DecodeConfig& config,
                     SplitMix64& rng) {
  StepEvaluator evaluator(query, trie, scorer, config);
  for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
    Candidate c;
    NodeView node = trie.root();
    bool dead = false;
    for (std::size_t depth = 1;; ++depth) {
      if (node.child_count() == 0) {
        c.word_value = node.terminal()->mean;
        return c;
      }
      if (depth > config.max_depth) {
        dead = true;
        break;
      }
      AdjustedStep step;
      try {
        step = evaluator.evaluate(node.id(), c.tokens, false);
      } catch (const DeadPrefixError&) {
        dead = true;
        break;
      }
      const double u = rng.uniform();
      double acc = 0.0;
      std::size_t pick = step.symbols.size();
      for (std::size_t i = 0; i < step.symbols.size(); ++i) {
        acc += step.probabilities[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      if (pick == step.symbols.size()) {
        // Rounding left u past the accumulated mass; take the last
        // candidate with positive probability.
        for (std::size_t i = step.symbols.size(); i-- > 0;) {
          if (step.probabilities[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
      c.log_prob_llm += safe_log(evaluator.llm(pick));
      c.log_score_adjusted += std::log(step.probabilities[pick]);
      if (step.symbols[pick] == kEndOfWord) {
        c.word_value = node.terminal()->mean;
        return c;
      }
      c.tokens.push_back(step.symbols[pick]);
      node = *node.child(step.symbols[pick]);
    }
    if (dead) {
      internal::logger().info("sample attempt {} hit a dead prefix; retrying", attempt + 1);
    }
  }
  throw DeadPrefixError("sampling failed after " +
                        std::to_string(config.max_retries + 1) + " attempts");
}

}  // namespace valuedec
