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

#ifndef NFSP_ENVS_REGISTRY_H_
#define NFSP_ENVS_REGISTRY_H_

#include <memory>
#include <string>
#include <vector>

#include "nfsp/envs/game.h"
#include "nfsp/envs/micro_rts.h"

namespace nfsp::envs {

struct GameSpec {
  // kuhn | biased_pennies | matching_pennies | rps | microrts
  std::string name = "kuhn";
  MicroRtsConfig microrts;
};

std::vector<std::string> GameNames();

// Throws std::invalid_argument for an unknown game name.
std::unique_ptr<GameEnv> MakeGame(const GameSpec& spec);

// True when the game exposes an exact tree (exploitability is available).
bool IsEnumerable(const std::string& name);

}  // namespace nfsp::envs

#endif  // NFSP_ENVS_REGISTRY_H_
