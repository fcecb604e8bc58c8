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

#ifndef NFSP_EVAL_BEST_RESPONSE_H_
#define NFSP_EVAL_BEST_RESPONSE_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "nfsp/envs/game.h"
#include "nfsp/nn/network.h"

namespace nfsp::eval {

// Behaviour strategy for both players: the action distribution (indexed by
// action id, zero on illegal actions) at any decision node.
class StrategyProfile {
 public:
  virtual ~StrategyProfile() = default;
  virtual std::vector<double> Policy(const envs::TreeState& state) const = 0;
};

class UniformProfile : public StrategyProfile {
 public:
  explicit UniformProfile(int num_actions) : num_actions_(num_actions) {}
  std::vector<double> Policy(const envs::TreeState& state) const override;

 private:
  int num_actions_;
};

// Information-set table. Lookups of unknown sets throw std::out_of_range.
class TabularProfile : public StrategyProfile {
 public:
  void Set(const std::string& infoset, std::vector<double> distribution);
  std::vector<double> Policy(const envs::TreeState& state) const override;
  const std::map<std::string, std::vector<double>>& table() const { return table_; }

 private:
  std::map<std::string, std::vector<double>> table_;
};

// Reads a policy head of a network; results are cached per information set.
class NetworkProfile : public StrategyProfile {
 public:
  NetworkProfile(std::shared_ptr<const nn::Network> net, nn::Head head);
  std::vector<double> Policy(const envs::TreeState& state) const override;

 private:
  std::shared_ptr<const nn::Network> net_;
  nn::Head head_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::vector<double>> cache_;
};

// Player 0 follows `first`, player 1 follows `second`.
class SeatProfile : public StrategyProfile {
 public:
  SeatProfile(std::shared_ptr<const StrategyProfile> first,
              std::shared_ptr<const StrategyProfile> second);
  std::vector<double> Policy(const envs::TreeState& state) const override;

 private:
  std::shared_ptr<const StrategyProfile> seats_[envs::kNumPlayers];
};

struct BestResponse {
  double value = 0.0;                   // expected return of the responder
  std::map<std::string, int> actions;   // responder information set -> action
};

// Throws std::invalid_argument for games without an exact tree; those are
// evaluated with the exploiter protocol instead.
std::unique_ptr<envs::TreeState> RequireTree(const envs::GameEnv& game);

// Exact imperfect-information best response of `player` against the other
// player's strategy in `profile`. Counterfactual values of every history in
// an information set are weighted by chance and opponent reach.
BestResponse ExactBestResponse(const envs::GameEnv& game, const StrategyProfile& profile,
                               int player);

envs::Rewards ExpectedReturns(const envs::GameEnv& game, const StrategyProfile& profile);

// sum_i (best response value_i - expected return_i). Zero exactly at a Nash
// equilibrium of a two-player zero-sum game.
double NashConv(const envs::GameEnv& game, const StrategyProfile& profile);

// Evaluates `profile` at every decision node into a table.
TabularProfile Tabulate(const envs::GameEnv& game, const StrategyProfile& profile);

}  // namespace nfsp::eval

#endif  // NFSP_EVAL_BEST_RESPONSE_H_
