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

#include "valuedec/align.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "log.h"
#include "valuedec/error.h"
#include "valuedec/random.h"
#include "valuedec/trie.h"

namespace valuedec {
namespace {

// log(1 + e^x)
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_target(double target_w, double target_l) {
  if (!(target_w >= 0.0 && target_l >= 0.0) ||
      std::abs(target_w + target_l - 1.0) > 1e-9) {
    throw InvalidArgument("eCPM targets must be a distribution over the pair");
  }
}

// KL(q || P) for two-point distributions given log q. Returns +inf when q
// puts mass where P has none.
// KL(q || p) for two-point distributions, summed as p * phi(q / p) with
// phi(r) = r ln r - r + 1. Equal to the usual sum because both pairs add up
// to 1, but every term is non-negative and second order in q - p, so
// rounding noise in a normalized pair cannot push the weight below 1.
double pair_kl(double log_q_w, double log_q_l, double target_w, double target_l) {
  double kl = 0.0;
  const double log_q[2] = {log_q_w, log_q_l};
  const double p[2] = {target_w, target_l};
  for (int i = 0; i < 2; ++i) {
    if (std::isinf(log_q[i])) {  // q = 0: phi(0) = 1
      kl += p[i];
      continue;
    }
    if (p[i] == 0.0) return std::numeric_limits<double>::infinity();
    const double log_r = log_q[i] - std::log(p[i]);
    const double r_minus_1 = std::expm1(log_r);
    kl += p[i] * ((1.0 + r_minus_1) * log_r - r_minus_1);
  }
  return std::max(kl, 0.0);
}

double weight_from_kl(double kl) {
  if (std::isinf(kl)) {
    internal::logger().warn(
        "policy puts mass on a zero-eCPM pair member; weight clamped to {}",
        kMinWdpoWeight);
    return kMinWdpoWeight;
  }
  return std::clamp(std::exp(-kl), kMinWdpoWeight, 1.0);
}

}  // namespace

void PairLogProbs::validate() const {
  for (double v : {policy_chosen, policy_rejected, reference_chosen, reference_rejected}) {
    if (!std::isfinite(v) || v > 0.0) {
      throw InvalidArgument("log-probabilities must be finite and <= 0");
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> admissible_pairs(
    std::span<const ScoredBidword> bidwords, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("tau must be >= 0");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < bidwords.size(); ++i) {
    for (std::size_t j = i + 1; j < bidwords.size(); ++j) {
      const double a = bidwords[i].ecpm;
      const double b = bidwords[j].ecpm;
      if (std::abs(a - b) > tau) out.emplace_back(a > b ? i : j, a > b ? j : i);
    }
  }
  return out;
}

std::vector<PreferencePair> sample_pairs(const BidwordLists& candidates,
                                         double tau, std::size_t per_query,
                                         std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<PreferencePair> out;
  for (const auto& [query, list] : candidates) {
    const auto admissible = admissible_pairs(list, tau);
    if (admissible.empty()) {
      internal::logger().warn("query '{}' has no pair with eCPM gap above {}",
                              query, tau);
      continue;
    }
    for (std::size_t n = 0; n < per_query; ++n) {
      const auto [w, l] = admissible[rng.below(admissible.size())];
      out.push_back({query, list[w].text, list[l].text, list[w].ecpm, list[l].ecpm});
    }
  }
  return out;
}

std::pair<double, double> normalized_ecpm(double ecpm_w, double ecpm_l) {
  check_ecpm(ecpm_w);
  check_ecpm(ecpm_l);
  const double total = ecpm_w + ecpm_l;
  if (!(total > 0.0)) throw InvalidArgument("both eCPM values are zero");
  return {ecpm_w / total, ecpm_l / total};
}

double wdpo_weight(double p_policy_w, double p_policy_l, double target_w,
                   double target_l) {
  if (!(p_policy_w > 0.0 && p_policy_l > 0.0) || !std::isfinite(p_policy_w) ||
      !std::isfinite(p_policy_l)) {
    throw InvalidArgument("policy probabilities must be positive");
  }
  check_target(target_w, target_l);
  const double z = p_policy_w + p_policy_l;
  return weight_from_kl(
      pair_kl(std::log(p_policy_w / z), std::log(p_policy_l / z), target_w, target_l));
}

double wdpo_weight_from_logs(double logp_policy_w, double logp_policy_l,
                             double target_w, double target_l) {
  if (!std::isfinite(logp_policy_w) || !std::isfinite(logp_policy_l)) {
    throw InvalidArgument("policy log-probabilities must be finite");
  }
  check_target(target_w, target_l);
  const double d = logp_policy_w - logp_policy_l;
  return weight_from_kl(pair_kl(-softplus(-d), -softplus(d), target_w, target_l));
}

double dpo_margin(const PairLogProbs& lp) {
  return (lp.policy_chosen - lp.reference_chosen) -
         (lp.policy_rejected - lp.reference_rejected);
}

double wdpo_loss(const PairLogProbs& lp, double beta, double weight) {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  // -log sigmoid(x) = softplus(-x)
  return weight * softplus(-beta * dpo_margin(lp));
}

double dpo_loss(const PairLogProbs& lp, double beta) {
  return wdpo_loss(lp, beta, 1.0);
}

PairLogProbs wdpo_gradient(const PairLogProbs& lp, double beta, double weight) {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  const double d_margin = -weight * beta * sigmoid(-beta * dpo_margin(lp));
  return {d_margin, -d_margin, -d_margin, d_margin};
}

WdpoDemoResult wdpo_demo(std::span<const ScoredBidword> candidates,
                         const WdpoDemoConfig& config) {
  if (candidates.size() < 2) throw InvalidArgument("demo needs at least two candidates");
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (config.pairs_per_step == 0) throw InvalidArgument("pairs_per_step must be positive");
  const auto pairs = admissible_pairs(candidates, config.tau);
  if (pairs.empty()) throw InvalidArgument("no candidate pair clears the eCPM threshold");

  const std::size_t n = candidates.size();
  const double log_ref = -std::log(static_cast<double>(n));
  SplitMix64 rng(config.seed);
  WdpoDemoResult result;
  result.logits.assign(n, 0.0);
  std::vector<double> log_pi(n);
  std::vector<double> grad(n);
  result.loss_trace.reserve(config.steps);

  for (std::size_t step = 0; step < config.steps; ++step) {
    const double top = *std::max_element(result.logits.begin(), result.logits.end());
    double z = 0.0;
    for (double l : result.logits) z += std::exp(l - top);
    const double log_z = top + std::log(z);
    for (std::size_t i = 0; i < n; ++i) log_pi[i] = result.logits[i] - log_z;

    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t b = 0; b < config.pairs_per_step; ++b) {
      const auto [w, l] = pairs[rng.below(pairs.size())];
      const PairLogProbs lp{log_pi[w], log_pi[l], log_ref, log_ref};
      const auto [target_w, target_l] =
          normalized_ecpm(candidates[w].ecpm, candidates[l].ecpm);
      const double weight = wdpo_weight_from_logs(lp.policy_chosen, lp.policy_rejected,
                                                  target_w, target_l);
      loss += wdpo_loss(lp, config.beta, weight);
      const PairLogProbs g = wdpo_gradient(lp, config.beta, weight);
      // d log_pi[i] / d logit[j] = [i == j] - pi[j]; the pi terms cancel in
      // the difference log_pi[w] - log_pi[l].
      grad[w] += g.policy_chosen;
      grad[l] += g.policy_rejected;
    }
    const double scale = config.learning_rate / static_cast<double>(config.pairs_per_step);
    for (std::size_t i = 0; i < n; ++i) result.logits[i] -= scale * grad[i];
    result.loss_trace.push_back(loss / static_cast<double>(config.pairs_per_step));
  }

  const double top = *std::max_element(result.logits.begin(), result.logits.end());
  double z = 0.0;
  for (double l : result.logits) z += std::exp(l - top);
  result.probabilities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.probabilities[i] = std::exp(result.logits[i] - top) / z;
  }
  result.ranking.resize(n);
  std::iota(result.ranking.begin(), result.ranking.end(), 0);
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return result.probabilities[a] > result.probabilities[b];
                   });
  return result;
}

}  // namespace valuedec
