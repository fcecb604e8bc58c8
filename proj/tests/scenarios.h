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

#ifndef NFSP_TESTS_SCENARIOS_H_
#define NFSP_TESTS_SCENARIOS_H_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "nfsp/cli/config.h"
#include "nfsp/common/random.h"
#include "nfsp/eval/best_response.h"
#include "nfsp/nn/network.h"
#include "nfsp/rl/hyperparams.h"
#include "nfsp/sl/reservoir.h"
#include "nfsp/sl/sl_update.h"
#include "nfsp/train/nfsp.h"

namespace nfsp::testing {

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Preset from configs/<name>.cfg with optional key=value overrides.
inline cli::RunConfig Preset(const std::string& source_dir, const std::string& name,
                             const std::vector<std::string>& overrides = {}) {
  return cli::ParseConfig(ReadFile(source_dir + "/configs/" + name + ".cfg"), overrides);
}

// Kuhn equilibrium family indexed by alpha in [0, 1/3]. Player 0 bets the
// jack with alpha and the king with 3 alpha, and calls with the queen after
// check-bet with alpha + 1/3. Player 1 bets the jack after a check with 1/3
// and calls a bet with the queen with 1/3.
inline eval::TabularProfile KuhnNashProfile(double alpha) {
  eval::TabularProfile p;
  auto set = [&](const std::string& key, double bet_or_call, bool facing_bet) {
    // Actions: fold, call, bet.
    if (facing_bet) {
      p.Set(key, {1.0 - bet_or_call, bet_or_call, 0.0});
    } else {
      p.Set(key, {0.0, 1.0 - bet_or_call, bet_or_call});
    }
  };
  set("P0:J:", alpha, false);
  set("P0:Q:", 0.0, false);
  set("P0:K:", 3 * alpha, false);
  set("P0:J:cb", 0.0, true);
  set("P0:Q:cb", alpha + 1.0 / 3, true);
  set("P0:K:cb", 1.0, true);
  set("P1:J:c", 1.0 / 3, false);
  set("P1:Q:c", 0.0, false);
  set("P1:K:c", 1.0, false);
  set("P1:J:b", 0.0, true);
  set("P1:Q:b", 1.0 / 3, true);
  set("P1:K:b", 1.0, true);
  return p;
}

struct AveragingOutcome {
  double final_l1 = 0.0;   // pi_SL against the running average at the end
  double worst_l1 = 0.0;   // worst over the second half of the schedule
};

// One-state repeated game with a scripted RL schedule: block j offers the
// distribution schedule[j mod m] to the reservoir while SL updates run.
inline AveragingOutcome RunAveraging(std::uint64_t seed, int blocks, int offers_per_block,
                                     int updates_per_block) {
  const int actions = 4;
  const std::vector<std::vector<double>> schedule = {{0.7, 0.1, 0.1, 0.1},
                                                     {0.1, 0.1, 0.2, 0.6},
                                                     {0.25, 0.5, 0.25, 0.0},
                                                     {0.0, 0.0, 0.5, 0.5}};
  nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(2, 1, 16, actions), seed);
  rl::Hyperparams h;
  h.lr_sl = 0.1;
  h.sl_sample = 256;
  h.max_grad_norm = 1.0;
  sl::ReservoirBuffer buffer(1 << 16, 2, actions, DeriveSeed(seed, 1));
  const double state[2] = {1.0, -0.5};
  const std::vector<std::uint8_t> legal(actions, 1);
  std::vector<double> total(actions, 0.0);
  std::int64_t offered = 0;
  nn::Inputs in;
  in.features = nn::Matrix(1, 2);
  in.features << state[0], state[1];
  AveragingOutcome out;
  for (int b = 0; b < blocks; ++b) {
    const auto& pi = schedule[static_cast<std::size_t>(b) % schedule.size()];
    for (int u = 0; u < updates_per_block; ++u) {
      for (int k = 0; k < offers_per_block / updates_per_block; ++k) {
        buffer.Insert(state, legal, pi);
        for (int a = 0; a < actions; ++a) total[a] += pi[a];
        ++offered;
      }
      sl::SlUpdate(net, buffer, h);
    }
    const nn::Matrix p = net.Forward(in, nn::Head::kPolicySl).policy_sl;
    double l1 = 0.0;
    for (int a = 0; a < actions; ++a) l1 += std::abs(p(0, a) - total[a] / offered);
    if (2 * b >= blocks) out.worst_l1 = std::max(out.worst_l1, l1);
    out.final_l1 = l1;
  }
  return out;
}

// Max over seats of the L1 distance between pi_SL and the (2/5, 3/5)
// equilibrium of biased matching pennies.
inline double PenniesDistance(const std::vector<train::AgentBundle>& bundles) {
  double worst = 0.0;
  for (int seat = 0; seat < 2; ++seat) {
    const nn::Network& net = bundles[bundles.size() == 1 ? 0 : seat].net;
    nn::Inputs in;
    in.features = nn::Matrix::Zero(1, 2);
    in.features(0, seat) = 1.0;
    in.legal = nn::Matrix::Ones(1, 2);
    const nn::Matrix p = net.Forward(in, nn::Head::kPolicySl).policy_sl;
    worst = std::max(worst, std::abs(p(0, 0) - 0.4) + std::abs(p(0, 1) - 0.6));
  }
  return worst;
}

}  // namespace nfsp::testing

#endif  // NFSP_TESTS_SCENARIOS_H_
