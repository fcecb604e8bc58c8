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

#ifndef NFSP_ENVS_KUHN_H_
#define NFSP_ENVS_KUHN_H_

#include <array>
#include <memory>
#include <string>

#include "nfsp/envs/game.h"

namespace nfsp::envs {

// Three-card Kuhn poker with a one-chip ante and one-chip bets. Actions are
// Fold, Call (check or call) and Bet; at most two of them are legal at any
// decision.
namespace kuhn {

enum Action : int { kFold = 0, kCall = 1, kBet = 2 };
inline constexpr int kNumActions = 3;
inline constexpr int kNumCards = 3;
inline constexpr int kNumDeals = 6;

// Features: [player one-hot (2)] [own card one-hot (3)]
//           [history one-hot over "", "c", "b", "cb" (4)]
inline constexpr int kFeatureSize = 9;

// The six ordered deals, indexed by chance outcome.
std::array<int, 2> Deal(int outcome);

}  // namespace kuhn

class KuhnState : public TreeState {
 public:
  KuhnState() = default;

  bool IsTerminal() const override;
  bool IsChance() const override { return cards_[0] < 0; }
  std::vector<std::pair<int, double>> ChanceOutcomes() const override;
  int CurrentPlayer() const override;
  std::vector<int> LegalActions() const override;
  std::unique_ptr<TreeState> Child(int action) const override;
  Rewards Returns() const override;
  std::string InfoSetKey(int player) const override;
  Observation Observe(int player) const override;
  std::string ToString() const override;
  std::unique_ptr<TreeState> Clone() const override {
    return std::make_unique<KuhnState>(*this);
  }

  void Apply(int action);
  const std::string& history() const { return history_; }
  int card(int player) const { return cards_[player]; }

 private:
  std::array<int, 2> cards_{-1, -1};
  std::string history_;  // 'c' call/check, 'b' bet, 'f' fold
};

class KuhnEnv : public GameEnv {
 public:
  GameKind kind() const override { return GameKind::kKuhn; }
  std::string name() const override { return "kuhn"; }
  int num_actions() const override { return kuhn::kNumActions; }
  ObservationShape observation_shape() const override {
    return {kuhn::kFeatureSize, 1, 1};
  }
  std::array<Observation, kNumPlayers> Reset(std::uint64_t seed) override;
  Observation Observe(int player) const override;
  bool IsActive(int player) const override;
  bool IsTerminal() const override { return state_.IsTerminal(); }
  int tick() const override { return static_cast<int>(state_.history().size()); }
  std::unique_ptr<GameEnv> Clone() const override;
  std::unique_ptr<TreeState> NewTreeRoot() const override;

  const KuhnState& state() const { return state_; }

 protected:
  StepResult DoStep(const JointAction& actions) override;
  std::vector<std::uint8_t> DoLegalActions(int player) const override;

 private:
  KuhnState state_;
};

}  // namespace nfsp::envs

#endif  // NFSP_ENVS_KUHN_H_
