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

#include "nfsp/envs/kuhn.h"

#include <stdexcept>

#include "nfsp/common/random.h"

namespace nfsp::envs {
namespace kuhn {

std::array<int, 2> Deal(int outcome) {
  static constexpr std::array<std::array<int, 2>, kNumDeals> kDeals = {
      {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};
  return kDeals.at(static_cast<std::size_t>(outcome));
}

}  // namespace kuhn

namespace {

int HistoryIndex(const std::string& h) {
  if (h.empty()) return 0;
  if (h == "c") return 1;
  if (h == "b") return 2;
  if (h == "cb") return 3;
  return -1;
}

char ActionChar(int action) {
  switch (action) {
    case kuhn::kFold: return 'f';
    case kuhn::kCall: return 'c';
    case kuhn::kBet: return 'b';
  }
  throw std::invalid_argument("kuhn: unknown action " + std::to_string(action));
}

constexpr char kCardNames[] = {'J', 'Q', 'K'};

}  // namespace

bool KuhnState::IsTerminal() const {
  return history_ == "cc" || history_ == "bc" || history_ == "bf" ||
         history_ == "cbc" || history_ == "cbf";
}

std::vector<std::pair<int, double>> KuhnState::ChanceOutcomes() const {
  std::vector<std::pair<int, double>> out;
  if (!IsChance()) return out;
  for (int i = 0; i < kuhn::kNumDeals; ++i) out.emplace_back(i, 1.0 / kuhn::kNumDeals);
  return out;
}

int KuhnState::CurrentPlayer() const {
  if (IsChance() || IsTerminal()) return kNoAction;
  return static_cast<int>(history_.size() % 2);
}

std::vector<int> KuhnState::LegalActions() const {
  if (IsChance()) {
    std::vector<int> deals(kuhn::kNumDeals);
    for (int i = 0; i < kuhn::kNumDeals; ++i) deals[i] = i;
    return deals;
  }
  if (IsTerminal()) return {};
  if (history_.empty() || history_ == "c") return {kuhn::kCall, kuhn::kBet};
  return {kuhn::kFold, kuhn::kCall};
}

void KuhnState::Apply(int action) {
  if (IsChance()) {
    cards_ = kuhn::Deal(action);
    return;
  }
  if (IsTerminal()) throw std::logic_error("kuhn: apply on terminal state");
  history_.push_back(ActionChar(action));
}

std::unique_ptr<TreeState> KuhnState::Child(int action) const {
  auto child = std::make_unique<KuhnState>(*this);
  child->Apply(action);
  return child;
}

Rewards KuhnState::Returns() const {
  if (!IsTerminal()) return {0.0, 0.0};
  const int winner = cards_[0] > cards_[1] ? 0 : 1;
  auto signed_for = [](int w, double amount) -> Rewards {
    return w == 0 ? Rewards{amount, -amount} : Rewards{-amount, amount};
  };
  if (history_ == "cc") return signed_for(winner, 1.0);
  if (history_ == "bc" || history_ == "cbc") return signed_for(winner, 2.0);
  if (history_ == "bf") return {1.0, -1.0};
  return {-1.0, 1.0};  // "cbf"
}

std::string KuhnState::InfoSetKey(int player) const {
  CheckPlayer(player);
  std::string key = "P";
  key += static_cast<char>('0' + player);
  key += ':';
  key += cards_[player] < 0 ? '?' : kCardNames[cards_[player]];
  key += ':';
  key += history_;
  return key;
}

Observation KuhnState::Observe(int player) const {
  CheckPlayer(player);
  Observation obs;
  obs.game = GameKind::kKuhn;
  obs.player = player;
  obs.tick = static_cast<int>(history_.size());
  obs.features.assign(kuhn::kFeatureSize, 0.0);
  obs.features[player] = 1.0;
  if (cards_[player] >= 0) obs.features[2 + cards_[player]] = 1.0;
  const int h = HistoryIndex(history_);
  if (h >= 0 && !IsTerminal()) obs.features[5 + h] = 1.0;
  obs.legal.assign(kuhn::kNumActions, 0);
  if (CurrentPlayer() == player) {
    for (int a : LegalActions()) obs.legal[a] = 1;
  }
  return obs;
}

std::string KuhnState::ToString() const {
  std::string s;
  s += cards_[0] < 0 ? '?' : kCardNames[cards_[0]];
  s += cards_[1] < 0 ? '?' : kCardNames[cards_[1]];
  s += ' ';
  s += history_;
  return s;
}

std::array<Observation, kNumPlayers> KuhnEnv::Reset(std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, 0x6b75686eULL));
  state_ = KuhnState();
  state_.Apply(static_cast<int>(UniformIndex(rng, kuhn::kNumDeals)));
  return {state_.Observe(0), state_.Observe(1)};
}

Observation KuhnEnv::Observe(int player) const { return state_.Observe(player); }

bool KuhnEnv::IsActive(int player) const { return state_.CurrentPlayer() == player; }

std::vector<std::uint8_t> KuhnEnv::DoLegalActions(int player) const {
  std::vector<std::uint8_t> mask(kuhn::kNumActions, 0);
  if (state_.CurrentPlayer() != player) return mask;
  for (int a : state_.LegalActions()) mask[a] = 1;
  return mask;
}

StepResult KuhnEnv::DoStep(const JointAction& actions) {
  if (state_.IsChance()) throw std::logic_error("kuhn: step before reset");
  state_.Apply(actions[state_.CurrentPlayer()]);
  StepResult result;
  result.terminal = state_.IsTerminal();
  if (result.terminal) result.rewards = state_.Returns();
  result.observations = {state_.Observe(0), state_.Observe(1)};
  return result;
}

std::unique_ptr<GameEnv> KuhnEnv::Clone() const { return std::make_unique<KuhnEnv>(*this); }

std::unique_ptr<TreeState> KuhnEnv::NewTreeRoot() const {
  return std::make_unique<KuhnState>();
}

}  // namespace nfsp::envs
