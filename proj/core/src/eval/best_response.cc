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

#include "nfsp/eval/best_response.h"

#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "nfsp/train/policy.h"

namespace nfsp::eval {
namespace {

constexpr std::size_t kMaxNodes = 1000000;

void Walk(const envs::TreeState& s, std::size_t* count,
          const std::function<void(const envs::TreeState&)>& visit) {
  if (++*count > kMaxNodes) throw std::invalid_argument("game tree exceeds 10^6 nodes");
  visit(s);
  if (s.IsTerminal()) return;
  if (s.IsChance()) {
    for (const auto& [a, p] : s.ChanceOutcomes()) Walk(*s.Child(a), count, visit);
  } else {
    for (int a : s.LegalActions()) Walk(*s.Child(a), count, visit);
  }
}

double ActionProb(const std::vector<double>& pi, int a) {
  return a < static_cast<int>(pi.size()) ? pi[a] : 0.0;
}

class Responder {
 public:
  Responder(const StrategyProfile& profile, int player) : profile_(profile), player_(player) {}

  void CollectReach(const envs::TreeState& s, double reach) {
    if (++nodes_ > kMaxNodes) throw std::invalid_argument("game tree exceeds 10^6 nodes");
    if (s.IsTerminal()) return;
    if (s.IsChance()) {
      for (const auto& [a, p] : s.ChanceOutcomes()) CollectReach(*s.Child(a), reach * p);
      return;
    }
    if (s.CurrentPlayer() == player_) {
      Node& node = sets_[s.InfoSetKey(player_)];
      node.states.push_back(s.Clone());
      node.reach.push_back(reach);
      for (int a : s.LegalActions()) CollectReach(*s.Child(a), reach);
      return;
    }
    const std::vector<double> pi = profile_.Policy(s);
    for (int a : s.LegalActions()) {
      const double p = ActionProb(pi, a);
      if (p > 0.0) CollectReach(*s.Child(a), reach * p);
    }
  }

  double Value(const envs::TreeState& s) {
    if (s.IsTerminal()) return s.Returns()[player_];
    if (s.IsChance()) {
      double v = 0.0;
      for (const auto& [a, p] : s.ChanceOutcomes()) v += p * Value(*s.Child(a));
      return v;
    }
    if (s.CurrentPlayer() == player_) return Value(*s.Child(Best(s.InfoSetKey(player_))));
    const std::vector<double> pi = profile_.Policy(s);
    double v = 0.0;
    for (int a : s.LegalActions()) {
      const double p = ActionProb(pi, a);
      if (p > 0.0) v += p * Value(*s.Child(a));
    }
    return v;
  }

  // Action maximising the reach-weighted value summed over the histories of
  // the information set. Ties go to the lowest action id.
  int Best(const std::string& key) {
    Node& node = sets_.at(key);
    if (node.best >= 0) return node.best;
    double best_value = 0.0;
    int best = -1;
    for (int a : node.states.front()->LegalActions()) {
      double v = 0.0;
      for (std::size_t h = 0; h < node.states.size(); ++h) {
        if (node.reach[h] > 0.0) v += node.reach[h] * Value(*node.states[h]->Child(a));
      }
      if (best < 0 || v > best_value) {
        best = a;
        best_value = v;
      }
    }
    node.best = best;
    return best;
  }

  std::map<std::string, int> Actions() {
    std::map<std::string, int> out;
    for (auto& entry : sets_) out[entry.first] = Best(entry.first);
    return out;
  }

 private:
  struct Node {
    std::vector<std::unique_ptr<envs::TreeState>> states;
    std::vector<double> reach;
    int best = -1;
  };

  const StrategyProfile& profile_;
  int player_;
  std::size_t nodes_ = 0;
  std::unordered_map<std::string, Node> sets_;
};

envs::Rewards Expected(const envs::TreeState& s, const StrategyProfile& profile) {
  if (s.IsTerminal()) return s.Returns();
  envs::Rewards v{0.0, 0.0};
  auto add = [&](const envs::Rewards& r, double p) {
    v[0] += p * r[0];
    v[1] += p * r[1];
  };
  if (s.IsChance()) {
    for (const auto& [a, p] : s.ChanceOutcomes()) add(Expected(*s.Child(a), profile), p);
    return v;
  }
  const std::vector<double> pi = profile.Policy(s);
  for (int a : s.LegalActions()) {
    const double p = ActionProb(pi, a);
    if (p > 0.0) add(Expected(*s.Child(a), profile), p);
  }
  return v;
}

}  // namespace

std::vector<double> UniformProfile::Policy(const envs::TreeState& state) const {
  std::vector<double> pi(num_actions_, 0.0);
  const std::vector<int> actions = state.LegalActions();
  for (int a : actions) pi[a] = 1.0 / static_cast<double>(actions.size());
  return pi;
}

void TabularProfile::Set(const std::string& infoset, std::vector<double> distribution) {
  table_[infoset] = std::move(distribution);
}

std::vector<double> TabularProfile::Policy(const envs::TreeState& state) const {
  const std::string key = state.InfoSetKey(state.CurrentPlayer());
  auto it = table_.find(key);
  if (it == table_.end()) throw std::out_of_range("profile has no entry for " + key);
  return it->second;
}

NetworkProfile::NetworkProfile(std::shared_ptr<const nn::Network> net, nn::Head head)
    : net_(std::move(net)), head_(head) {
  if (head == nn::Head::kValueRl) throw std::invalid_argument("value head is not a policy");
}

std::vector<double> NetworkProfile::Policy(const envs::TreeState& state) const {
  const int player = state.CurrentPlayer();
  const std::string key = state.InfoSetKey(player);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const envs::Observation obs = state.Observe(player);
  const envs::Observation* ptr = &obs;
  const nn::Outputs out = net_->Forward(train::MakeInputs(std::span(&ptr, 1), net_->arch()), head_);
  const nn::Matrix& p = head_ == nn::Head::kPolicySl ? out.policy_sl : out.policy_rl;
  std::vector<double> pi(p.data(), p.data() + p.cols());
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, pi);
  return pi;
}

SeatProfile::SeatProfile(std::shared_ptr<const StrategyProfile> first,
                         std::shared_ptr<const StrategyProfile> second)
    : seats_{std::move(first), std::move(second)} {}

std::vector<double> SeatProfile::Policy(const envs::TreeState& state) const {
  return seats_[state.CurrentPlayer()]->Policy(state);
}

std::unique_ptr<envs::TreeState> RequireTree(const envs::GameEnv& game) {
  std::unique_ptr<envs::TreeState> root = game.NewTreeRoot();
  if (!root) {
    throw std::invalid_argument(game.name() +
                                " has no enumerable tree; estimate exploitability with the "
                                "exploit command (exploiter training) instead");
  }
  return root;
}

BestResponse ExactBestResponse(const envs::GameEnv& game, const StrategyProfile& profile,
                               int player) {
  envs::CheckPlayer(player);
  const std::unique_ptr<envs::TreeState> root = RequireTree(game);
  Responder r(profile, player);
  r.CollectReach(*root, 1.0);
  BestResponse out;
  out.value = r.Value(*root);
  out.actions = r.Actions();
  return out;
}

envs::Rewards ExpectedReturns(const envs::GameEnv& game, const StrategyProfile& profile) {
  return Expected(*RequireTree(game), profile);
}

double NashConv(const envs::GameEnv& game, const StrategyProfile& profile) {
  const envs::Rewards on_policy = ExpectedReturns(game, profile);
  double total = 0.0;
  for (int p = 0; p < envs::kNumPlayers; ++p) {
    total += ExactBestResponse(game, profile, p).value - on_policy[p];
  }
  return total;
}

TabularProfile Tabulate(const envs::GameEnv& game, const StrategyProfile& profile) {
  TabularProfile table;
  std::size_t count = 0;
  Walk(*RequireTree(game), &count, [&](const envs::TreeState& s) {
    if (s.IsTerminal() || s.IsChance()) return;
    table.Set(s.InfoSetKey(s.CurrentPlayer()), profile.Policy(s));
  });
  return table;
}

}  // namespace nfsp::eval
