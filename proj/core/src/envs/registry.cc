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

#include "nfsp/envs/registry.h"

#include <stdexcept>

#include "nfsp/envs/kuhn.h"
#include "nfsp/envs/matrix_game.h"

namespace nfsp::envs {

std::vector<std::string> GameNames() {
  return {"kuhn", "biased_pennies", "matching_pennies", "rps", "microrts"};
}

std::unique_ptr<GameEnv> MakeGame(const GameSpec& spec) {
  if (spec.name == "kuhn") return std::make_unique<KuhnEnv>();
  if (spec.name == "biased_pennies") return std::make_unique<MatrixGameEnv>(BiasedMatchingPennies());
  if (spec.name == "matching_pennies") return std::make_unique<MatrixGameEnv>(MatchingPennies());
  if (spec.name == "rps") return std::make_unique<MatrixGameEnv>(RockPaperScissors());
  if (spec.name == "microrts") return std::make_unique<MicroRtsEnv>(spec.microrts);
  throw std::invalid_argument("unknown game '" + spec.name +
                              "' (expected kuhn, biased_pennies, matching_pennies, rps or microrts)");
}

bool IsEnumerable(const std::string& name) { return name != "microrts"; }

}  // namespace nfsp::envs
