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

#include "nfsp/envs/matrix_game.h"

#include <stdexcept>

namespace nfsp::envs {

MatrixPayoff BiasedMatchingPennies() {
  return {"biased_pennies", {{2.0, -1.0}, {-1.0, 1.0}}};
}

MatrixPayoff MatchingPennies() {
  return {"matching_pennies", {{1.0, -1.0}, {-1.0, 1.0}}};
}

MatrixPayoff RockPaperScissors() {
  return {"rps", {{0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}}};
}

namespace {

Observation MatrixObservation(int player, int num_actions, bool to_move) {
  Observation obs;
  obs.game = GameKind::kMatrix;
  obs.player = player;
  obs.features.assign(kNumPlayers, 0.0);
  obs.features[player] = 1.0;
  obs.legal.assign(num_actions, to_move ? 1 : 0);
  return obs;
}

void ValidatePayoff(const MatrixPayoff& p) {
  if (p.num_actions() < 2) throw std::invalid_argument("matrix game needs >= 2 actions");
  for (const auto& row : p.row_payoff) {
    if (static_cast<int>(row.size()) != p.num_actions()) {
      throw std::invalid_argument("matrix game payoff must be square");
    }
  }
}

}  // namespace

MatrixState::MatrixState(std::shared_ptr<const MatrixPayoff> payoff)
    : payoff_(std::move(payoff)) {}

std::vector<int> MatrixState::LegalActions() const {
  if (IsTerminal()) return {};
  std::vector<int> actions(payoff_->num_actions());
  for (int i = 0; i < payoff_->num_actions(); ++i) actions[i] = i;
  return actions;
}

std::unique_ptr<TreeState> MatrixState::Child(int action) const {
  if (IsTerminal()) throw std::logic_error("matrix game: child of terminal state");
  if (action < 0 || action >= payoff_->num_actions()) {
    throw std::invalid_argument("matrix game: illegal action " + std::to_string(action));
  }
  auto child = std::make_unique<MatrixState>(*this);
  child->actions_[moves_] = action;
  ++child->moves_;
  return child;
}

Rewards MatrixState::Returns() const {
  if (!IsTerminal()) return {0.0, 0.0};
  const double v = payoff_->row_payoff[actions_[0]][actions_[1]];
  return {v, -v};
}

std::string MatrixState::InfoSetKey(int player) const {
  CheckPlayer(player);
  // Neither player observes the other's move before acting.
  return "P" + std::to_string(player);
}

Observation MatrixState::Observe(int player) const {
  CheckPlayer(player);
  return MatrixObservation(player, payoff_->num_actions(), CurrentPlayer() == player);
}

std::string MatrixState::ToString() const {
  return std::to_string(actions_[0]) + "," + std::to_string(actions_[1]);
}

MatrixGameEnv::MatrixGameEnv(MatrixPayoff payoff) {
  ValidatePayoff(payoff);
  payoff_ = std::make_shared<const MatrixPayoff>(std::move(payoff));
}

std::array<Observation, kNumPlayers> MatrixGameEnv::Reset(std::uint64_t) {
  done_ = false;
  return {Observe(0), Observe(1)};
}

Observation MatrixGameEnv::Observe(int player) const {
  CheckPlayer(player);
  return MatrixObservation(player, payoff_->num_actions(), !done_);
}

std::vector<std::uint8_t> MatrixGameEnv::DoLegalActions(int) const {
  return std::vector<std::uint8_t>(payoff_->num_actions(), done_ ? 0 : 1);
}

StepResult MatrixGameEnv::DoStep(const JointAction& actions) {
  done_ = true;
  StepResult result;
  result.terminal = true;
  const double v = payoff_->row_payoff[actions[0]][actions[1]];
  result.rewards = {v, -v};
  result.observations = {Observe(0), Observe(1)};
  return result;
}

std::unique_ptr<GameEnv> MatrixGameEnv::Clone() const {
  return std::make_unique<MatrixGameEnv>(*this);
}

std::unique_ptr<TreeState> MatrixGameEnv::NewTreeRoot() const {
  return std::make_unique<MatrixState>(payoff_);
}

}  // namespace nfsp::envs
