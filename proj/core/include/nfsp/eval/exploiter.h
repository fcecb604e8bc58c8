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

#ifndef NFSP_EVAL_EXPLOITER_H_
#define NFSP_EVAL_EXPLOITER_H_

#include <cstdint>
#include <memory>

#include "nfsp/eval/winrate.h"
#include "nfsp/train/nfsp.h"

namespace nfsp::eval {

struct ExploiterConfig {
  // Game, architecture, hyperparameters, seed and budgets of the PPO run.
  // The opponent field is overwritten with the frozen target.
  train::TrainConfig train;
  std::int64_t eval_games = kHeadlineGames;
  std::uint64_t eval_seed = 1;
};

struct ExploiterResult {
  train::AgentBundle exploiter;
  EvalReport report;  // exploiter's win rate against the target
};

// Trains a fresh PPO agent (no SL side) against the frozen target and
// evaluates it. The exploiter's win rate estimates a lower bound on how
// exploitable the target is.
ExploiterResult TrainExploiter(std::shared_ptr<const train::Policy> target,
                               const ExploiterConfig& config,
                               const train::RunHooks& hooks = {});

}  // namespace nfsp::eval

#endif  // NFSP_EVAL_EXPLOITER_H_
