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

#ifndef NFSP_SL_SL_UPDATE_H_
#define NFSP_SL_SL_UPDATE_H_

#include "nfsp/nn/network.h"
#include "nfsp/rl/hyperparams.h"
#include "nfsp/rl/ppo.h"
#include "nfsp/sl/reservoir.h"

namespace nfsp::sl {

// mean_t -sum_a target[t, a] log max(probs[t, a], 1e-12); gradient with
// respect to probs.
rl::LossTerm SlLoss(const nn::Matrix& targets, const nn::Matrix& probs);

struct SlMetrics {
  double loss = 0.0;
  double grad_norm = 0.0;  // before clipping
  bool skipped = false;    // empty buffer or non-finite loss
};

struct SlGradient {
  nn::GradientSet grads;  // clipped; touches only the pi_SL body and head
  SlMetrics metrics;
};

SlGradient SlGradientFor(const nn::Network& net, const SlBatch& batch, const rl::Hyperparams& h);

// Draws sl_sample tuples and takes one clipped SGD step at lr_sl. An empty
// buffer leaves the network untouched and reports skipped.
SlMetrics SlUpdate(nn::Network& net, ReservoirBuffer& buffer, const rl::Hyperparams& h);

}  // namespace nfsp::sl

#endif  // NFSP_SL_SL_UPDATE_H_
