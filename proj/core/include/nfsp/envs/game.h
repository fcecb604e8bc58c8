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

#ifndef NFSP_ENVS_GAME_H_
#define NFSP_ENVS_GAME_H_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nfsp::envs {

inline constexpr int kNumPlayers = 2;
inline constexpr int kNoAction = -1;

enum class GameKind { kKuhn, kMatrix, kMicroRts };

struct ObservationShape {
  int channels = 1;
  int height = 1;
  int width = 1;
  int size() const { return channels * height * width; }
};

struct Observation {
  GameKind game = GameKind::kKuhn;
  int player = 0;
  int tick = 0;
  std::vector<double> features;
  std::vector<std::uint8_t> legal;  // one entry per action; all zero when not to move

  bool IsLegal(int action) const {
    return action >= 0 && action < static_cast<int>(legal.size()) && legal[action];
  }
  int NumLegal() const;
};

// 64-bit FNV-1a over the feature bytes, the legal mask and the player id.
std::uint64_t HashObservation(const Observation& obs);

using JointAction = std::array<int, kNumPlayers>;
using Rewards = std::array<double, kNumPlayers>;

struct StepResult {
  std::array<Observation, kNumPlayers> observations;
  Rewards rewards{};
  bool terminal = false;
};

// One node of an enumerable game tree. Simultaneous moves are serialised with
// the later mover's information set hiding the earlier move.
class TreeState {
 public:
  virtual ~TreeState() = default;
  virtual bool IsTerminal() const = 0;
  virtual bool IsChance() const = 0;
  virtual std::vector<std::pair<int, double>> ChanceOutcomes() const = 0;
  virtual int CurrentPlayer() const = 0;
  virtual std::vector<int> LegalActions() const = 0;
  virtual std::unique_ptr<TreeState> Child(int action) const = 0;
  virtual Rewards Returns() const = 0;
  virtual std::string InfoSetKey(int player) const = 0;
  virtual Observation Observe(int player) const = 0;
  virtual std::string ToString() const = 0;
  virtual std::unique_ptr<TreeState> Clone() const = 0;
};

// Two-player zero-sum environment stepped with one joint action per decision.
// Players that are not to move in a given step pass kNoAction.
class GameEnv {
 public:
  virtual ~GameEnv() = default;

  virtual GameKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual int num_actions() const = 0;
  virtual ObservationShape observation_shape() const = 0;

  virtual std::array<Observation, kNumPlayers> Reset(std::uint64_t seed) = 0;

  // Validates the joint action, then advances. Throws std::logic_error after
  // a terminal state and std::invalid_argument for an illegal action.
  StepResult Step(const JointAction& actions);

  // Throws std::out_of_range for an unknown player.
  std::vector<std::uint8_t> LegalActions(int player) const;
  virtual Observation Observe(int player) const = 0;
  virtual bool IsActive(int player) const = 0;
  virtual bool IsTerminal() const = 0;
  virtual int tick() const = 0;
  virtual std::unique_ptr<GameEnv> Clone() const = 0;

  // Exact game tree root for enumerable games, nullptr otherwise.
  virtual std::unique_ptr<TreeState> NewTreeRoot() const { return nullptr; }

 protected:
  virtual StepResult DoStep(const JointAction& actions) = 0;
  virtual std::vector<std::uint8_t> DoLegalActions(int player) const = 0;
};

void CheckPlayer(int player);

}  // namespace nfsp::envs

#endif  // NFSP_ENVS_GAME_H_
