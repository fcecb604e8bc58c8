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

#ifndef NFSP_TRAIN_TRANSFER_H_
#define NFSP_TRAIN_TRANSFER_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "nfsp/nn/network.h"
#include "nfsp/train/nfsp.h"

namespace nfsp::train {

struct TransferOptions {
  // Initialise the SL body and pi_SL head from the source's RL body and
  // pi_RL head. When false the SL side keeps its fresh initialisation.
  bool copy_sl = true;
  // Copy V_RL from the source, or keep a fresh one.
  bool copy_value = true;
  std::uint64_t seed = 1;  // fresh parameters for anything not copied
};

// Builds an NFSP starting network from a self-play network of the same
// architecture. Throws std::invalid_argument on an architecture mismatch.
nn::Network PretrainTransfer(const nn::Network& source, const nn::ArchSpec& target,
                             const TransferOptions& options);

struct PretrainResult {
  nn::Network selfplay;              // first self-play bundle at hand-off
  std::vector<AgentBundle> bundles;  // NFSP starting bundles
};

// Runs `selfplay_updates` rounds of raw self-play under `nfsp_config`'s game,
// architecture and hyperparameters, then transfers into fresh NFSP bundles.
// Bundle b draws its uncopied parameters from DeriveSeed(config seed, 0x7866 + b).
PretrainResult PretrainBundles(
    const TrainConfig& nfsp_config, std::int64_t selfplay_updates, TransferOptions options,
    const std::function<void(const std::vector<UpdateRecord>&)>& on_round = {});

}  // namespace nfsp::train

#endif  // NFSP_TRAIN_TRANSFER_H_
