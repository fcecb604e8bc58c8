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

#include "nfsp/eval/exploiter.h"

#include <stdexcept>

namespace nfsp::eval {

ExploiterResult TrainExploiter(std::shared_ptr<const train::Policy> target,
                               const ExploiterConfig& config, const train::RunHooks& hooks) {
  if (!target) throw std::invalid_argument("exploiter: no target policy");
  train::TrainConfig tc = config.train;
  tc.fixed_opponent = target;
  tc.mode = train::Mode::kSelfPlay;
  train::NfspRunner runner(tc);
  runner.Run(hooks);
  ExploiterResult out{std::move(runner.bundles().front()), {}};
  const train::NetworkPolicy agent(std::make_shared<const nn::Network>(out.exploiter.net),
                                   nn::Head::kPolicyRl, "exploiter");
  out.report = EvaluateWinrate(agent, *target, tc.game, config.eval_games, config.eval_seed);
  out.report.opponent = target->name();
  return out;
}

}  // namespace nfsp::eval
