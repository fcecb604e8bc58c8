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

#ifndef NFSP_ENVS_MATRIX_GAME_H_
#define NFSP_ENVS_MATRIX_GAME_H_

#include <memory>
#include <string>
#include <vector>

#include "nfsp/envs/game.h"

namespace nfsp::envs {

// One-shot simultaneous zero-sum game given by the row player's payoff
// matrix. Observation features are the player one-hot only.
struct MatrixPayoff {
  std::string name;
  std::vector<std::vector<double>> row_payoff;  // [row action][column action]

  int num_actions() const { return static_cast<int>(row_payoff.size()); }
};

// Matching pennies where the row player ("matcher") wins 2 on heads-heads,
// 1 on tails-tails and loses 1 on a mismatch. Equilibrium: both players
// play heads with probability 2/5; value 1/5 to the matcher.
MatrixPayoff BiasedMatchingPennies();
MatrixPayoff MatchingPennies();
MatrixPayoff RockPaperScissors();

class MatrixState : public TreeState {
 public:
  explicit MatrixState(std::shared_ptr<const MatrixPayoff> payoff);

  bool IsTerminal() const override { return moves_ == 2; }
  bool IsChance() const override { return false; }
  std::vector<std::pair<int, double>> ChanceOutcomes() const override { return {}; }
  int CurrentPlayer() const override { return moves_ < 2 ? moves_ : kNoAction; }
  std::vector<int> LegalActions() const override;
  std::unique_ptr<TreeState> Child(int action) const override;
  Rewards Returns() const override;
  std::string InfoSetKey(int player) const override;
  Observation Observe(int player) const override;
  std::string ToString() const override;
  std::unique_ptr<TreeState> Clone() const override {
    return std::make_unique<MatrixState>(*this);
  }

 private:
  std::shared_ptr<const MatrixPayoff> payoff_;
  int actions_[2] = {-1, -1};
  int moves_ = 0;
};

class MatrixGameEnv : public GameEnv {
 public:
  explicit MatrixGameEnv(MatrixPayoff payoff);

  GameKind kind() const override { return GameKind::kMatrix; }
  std::string name() const override { return payoff_->name; }
  int num_actions() const override { return payoff_->num_actions(); }
  ObservationShape observation_shape() const override { return {kNumPlayers, 1, 1}; }
  std::array<Observation, kNumPlayers> Reset(std::uint64_t seed) override;
  Observation Observe(int player) const override;
  bool IsActive(int player) const override { return !done_ && player >= 0 && player < 2; }
  bool IsTerminal() const override { return done_; }
  int tick() const override { return done_ ? 1 : 0; }
  std::unique_ptr<GameEnv> Clone() const override;
  std::unique_ptr<TreeState> NewTreeRoot() const override;

  const MatrixPayoff& payoff() const { return *payoff_; }

 protected:
  StepResult DoStep(const JointAction& actions) override;
  std::vector<std::uint8_t> DoLegalActions(int player) const override;

 private:
  std::shared_ptr<const MatrixPayoff> payoff_;
  bool done_ = false;
};

}  // namespace nfsp::envs

#endif  // NFSP_ENVS_MATRIX_GAME_H_
