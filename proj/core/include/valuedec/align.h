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

#ifndef VALUEDEC_ALIGN_H_
#define VALUEDEC_ALIGN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "valuedec/dataset.h"

namespace valuedec {

// Preference pair; `chosen` has the strictly higher eCPM.
struct PreferencePair {
  std::string query;
  std::string chosen;
  std::string rejected;
  double ecpm_chosen = 0.0;
  double ecpm_rejected = 0.0;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

// Sequence log-probabilities of both pair members under the trained policy
// and the frozen reference.
struct PairLogProbs {
  double policy_chosen = 0.0;
  double policy_rejected = 0.0;
  double reference_chosen = 0.0;
  double reference_rejected = 0.0;

  void validate() const;
};

// Ordered (winner, loser) index pairs with |ecpm_w - ecpm_l| > tau.
std::vector<std::pair<std::size_t, std::size_t>> admissible_pairs(
    std::span<const ScoredBidword> bidwords, double tau);

// Draws `per_query` pairs per query, uniformly with replacement from its
// admissible pairs. Queries without one are skipped with a warning.
std::vector<PreferencePair> sample_pairs(const BidwordLists& candidates,
                                         double tau, std::size_t per_query,
                                         std::uint64_t seed);

// (ecpm_w, ecpm_l) / (ecpm_w + ecpm_l). Throws when the sum is not positive.
std::pair<double, double> normalized_ecpm(double ecpm_w, double ecpm_l);

inline constexpr double kMinWdpoWeight = 1e-12;

// exp(-KL(q || P)) where q is the policy pair normalized over the two
// members. Clamped to [kMinWdpoWeight, 1].
double wdpo_weight(double p_policy_w, double p_policy_l, double target_w,
                   double target_l);

// Same weight from sequence log-probabilities, which avoids underflow on long
// sequences.
double wdpo_weight_from_logs(double logp_policy_w, double logp_policy_l,
                             double target_w, double target_l);

// margin = (policy_w - reference_w) - (policy_l - reference_l)
double dpo_margin(const PairLogProbs& lp);

// -w * log sigmoid(beta * margin), evaluated without overflow.
double wdpo_loss(const PairLogProbs& lp, double beta, double weight);

// The unweighted loss (weight 1).
double dpo_loss(const PairLogProbs& lp, double beta);

// Partial derivatives of wdpo_loss with the weight held constant.
PairLogProbs wdpo_gradient(const PairLogProbs& lp, double beta, double weight);

struct WdpoDemoConfig {
  std::size_t steps = 2000;
  double learning_rate = 1.0;
  double beta = 0.1;
  double tau = 0.0;
  std::size_t pairs_per_step = 8;
  std::uint64_t seed = 0;
};

struct WdpoDemoResult {
  std::vector<double> logits;
  std::vector<double> probabilities;
  std::vector<double> loss_trace;  // mean minibatch loss per step
  // Candidate indices by descending policy probability, ties by index.
  std::vector<std::size_t> ranking;
};

// Trains a softmax policy over `candidates` against a uniform reference by
// gradient descent on the weighted loss over sampled pairs.
WdpoDemoResult wdpo_demo(std::span<const ScoredBidword> candidates,
                         const WdpoDemoConfig& config);

}  // namespace valuedec

#endif  // VALUEDEC_ALIGN_H_
