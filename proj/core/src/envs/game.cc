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

#include "nfsp/envs/game.h"

#include <cstring>
#include <stdexcept>
#include <string>

namespace nfsp::envs {

int Observation::NumLegal() const {
  int n = 0;
  for (auto v : legal) n += v ? 1 : 0;
  return n;
}

std::uint64_t HashObservation(const Observation& obs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int32_t player = obs.player;
  mix(&player, sizeof(player));
  for (double f : obs.features) {
    // Canonicalise -0.0 so equal encodings hash equally.
    const double v = f == 0.0 ? 0.0 : f;
    mix(&v, sizeof(v));
  }
  mix(obs.legal.data(), obs.legal.size());
  return h;
}

void CheckPlayer(int player) {
  if (player < 0 || player >= kNumPlayers) {
    throw std::out_of_range("unknown player " + std::to_string(player));
  }
}

std::vector<std::uint8_t> GameEnv::LegalActions(int player) const {
  CheckPlayer(player);
  return DoLegalActions(player);
}

StepResult GameEnv::Step(const JointAction& actions) {
  if (IsTerminal()) {
    throw std::logic_error(name() + ": step called after the episode ended");
  }
  for (int p = 0; p < kNumPlayers; ++p) {
    if (!IsActive(p)) continue;
    const auto legal = DoLegalActions(p);
    const int a = actions[p];
    if (a < 0 || a >= static_cast<int>(legal.size()) || !legal[a]) {
      throw std::invalid_argument(name() + ": illegal action " + std::to_string(a) +
                                  " for player " + std::to_string(p));
    }
  }
  return DoStep(actions);
}

}  // namespace nfsp::envs
