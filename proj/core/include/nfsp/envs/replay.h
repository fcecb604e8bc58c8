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

#ifndef NFSP_ENVS_REPLAY_H_
#define NFSP_ENVS_REPLAY_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfsp/envs/game.h"

namespace nfsp::envs {

// JSON-lines episode log. The first line is a header
//   {"format":"nfsp-replay","version":1,"game":"kuhn","seed":7}
// followed by one line per decision:
//   {"tick":0,"player":1,"obs_hash":"9c1f...","action":2,"reward":0.0}
// `reward` is the reward that player received from the step the decision
// belongs to.
struct ReplayRecord {
  int tick = 0;
  int player = 0;
  std::uint64_t obs_hash = 0;
  int action = kNoAction;
  double reward = 0.0;

  bool operator==(const ReplayRecord&) const = default;
};

struct ReplayLog {
  static constexpr int kVersion = 1;
  std::string game;
  std::uint64_t seed = 0;
  std::vector<ReplayRecord> records;
};

void WriteReplay(std::ostream& out, const ReplayLog& log);
ReplayLog ReadReplay(std::istream& in);

using SeatPolicy = std::function<int(const Observation& obs)>;

// Plays one episode from Reset(seed), recording every decision.
ReplayLog RecordEpisode(GameEnv& env, std::uint64_t seed, const SeatPolicy& player0,
                        const SeatPolicy& player1);

// Re-plays the logged actions from Reset(log.seed) and checks every
// observation hash and reward. On mismatch returns false and describes the
// first difference in `why`.
bool VerifyReplay(GameEnv& env, const ReplayLog& log, std::string* why = nullptr);

}  // namespace nfsp::envs

#endif  // NFSP_ENVS_REPLAY_H_
