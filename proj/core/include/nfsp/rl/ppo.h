// Copyright 2026 The NFSP-PPO Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NFSP_RL_PPO_H_
#define NFSP_RL_PPO_H_

#include <cstdint>
#include <span>
#include <vector>

#include "nfsp/nn/network.h"
#include "nfsp/rl/hyperparams.h"

namespace nfsp::rl {

using nn::Matrix;
using nn::Vector;

// Loss value with its gradient with respect to the loss inputs
// (probabilities or values, one row per sample).
struct LossTerm {
  double value = 0.0;
  Matrix grad;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> targets;  // advantages + values[t]
};

// One lane of length T. `values` holds T + 1 entries: the value estimates at
// each decision followed by the bootstrap estimate for the state after the
// window. terminal[t] marks the last decision of an episode; the residual
// there uses a zero next value and the advantage sum stops.
//   delta_t = r_t + gamma * V_{t+1} - V_t
//   A_t     = sum_l decay^l * delta_{t+l}
GaeResult ComputeGae(std::span<const double> rewards, std::span<const double> values,
                     std::span<const std::uint8_t> terminal, double gamma, double decay);

// (A - mean) / max(population std, 1e-8). Needs at least two entries.
std::vector<double> NormalizeAdvantages(std::span<const double> advantages);

// -mean_t min(r_t A_t, clip(r_t, 1 - eps, 1 + eps) A_t) with
// r_t = probs[t, a_t] / old_probs[t, a_t]. Gradient is with respect to probs.
LossTerm PpoPolicyLoss(const Matrix& probs, const Matrix& old_probs,
                       std::span<const int> actions, std::span<const double> advantages,
                       double eps);

// mean_t sum_a p log p, with 0 log 0 = 0 and logs floored at 1e-12.
LossTerm EntropyTerm(const Matrix& probs);

// mean_t max((v - target)^2, (clip(v - v_old, -eps, eps) + v_old - target)^2).
// The gradient is a column vector.
LossTerm ClippedValueLoss(std::span<const double> v_new, std::span<const double> v_old,
                          std::span<const double> targets, double eps);

// Rollout windows of a single learner: `lanes` sequences of `steps`
// decisions each, flattened lane-major (row = lane * steps + t).
struct TrajectoryBatch {
  int lanes = 0;
  int steps = 0;
  Matrix states;
  Matrix legal;
  std::vector<int> actions;
  Matrix old_policy;                  // pi_RL rows at decision time
  std::vector<double> rewards;
  std::vector<double> values_old;     // V_RL at decision time
  std::vector<double> bootstrap;      // per lane: value after the window
  std::vector<std::uint8_t> terminal;

  int size() const { return lanes * steps; }
  // Throws std::invalid_argument on misaligned fields or a taken action with
  // zero stored probability.
  void Validate() const;
};

struct PpoMetrics {
  double policy_loss = 0.0;
  double entropy = 0.0;
  double value_loss = 0.0;
  double total_loss = 0.0;
  double grad_norm = 0.0;   // before clipping
  double mean_abs_advantage = 0.0;
  double mean_ratio = 0.0;
  bool aborted = false;     // non-finite loss; no parameters changed
};

struct PpoGradient {
  nn::GradientSet grads;    // clipped
  PpoMetrics metrics;
};

// Computes the clipped gradient of
//   L_RL = L_policy + entropy_coef * L_entropy + value_coef * L_value
// through the pi_RL and V_RL heads without applying it.
PpoGradient PpoGradientFor(const nn::Network& net, const TrajectoryBatch& batch,
                           const Hyperparams& h);

// `epochs` steps of plain SGD at lr_rl on the clipped gradient.
PpoMetrics PpoUpdate(nn::Network& net, const TrajectoryBatch& batch, const Hyperparams& h);

}  // namespace nfsp::rl

#endif  // NFSP_RL_PPO_H_
