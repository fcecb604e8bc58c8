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

#include "nfsp/train/policy.h"

#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace nfsp::train {

int Policy::ActOne(const envs::Observation& obs, Rng& rng) const {
  const envs::Observation* o = &obs;
  Rng* r = &rng;
  int a = envs::kNoAction;
  Act(std::span(&o, 1), std::span(&r, 1), std::span(&a, 1));
  return a;
}

nn::Inputs MakeInputs(std::span<const envs::Observation* const> obs, const nn::ArchSpec& arch) {
  const int f = arch.InputSize();
  const int a = arch.num_actions;
  nn::Inputs in;
  in.features.resize(static_cast<Eigen::Index>(obs.size()), f);
  in.legal.resize(static_cast<Eigen::Index>(obs.size()), a);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const envs::Observation& o = *obs[i];
    if (static_cast<int>(o.features.size()) != f || static_cast<int>(o.legal.size()) != a) {
      throw std::invalid_argument(
          "observation shape mismatch: expected " + std::to_string(f) + " features and " +
          std::to_string(a) + " actions, got " + std::to_string(o.features.size()) + " and " +
          std::to_string(o.legal.size()));
    }
    const auto row = static_cast<Eigen::Index>(i);
    for (int j = 0; j < f; ++j) in.features(row, j) = o.features[j];
    for (int j = 0; j < a; ++j) in.legal(row, j) = o.legal[j];
  }
  return in;
}

int SampleMasked(std::span<const double> probs, const envs::Observation& obs, Rng& rng) {
  std::vector<double> w(probs.size(), 0.0);
  for (std::size_t a = 0; a < probs.size(); ++a) {
    if (obs.IsLegal(static_cast<int>(a)) && probs[a] > 0.0) w[a] = probs[a];
  }
  const int pick = SampleIndex(w, rng);
  if (pick >= 0) return pick;
  spdlog::warn("policy put no mass on the legal actions; sampling uniformly");
  return envs::UniformLegalAction(obs, rng);
}

namespace {

void Sample(const nn::Network& net, nn::Head head,
            std::span<const envs::Observation* const> obs, std::span<Rng* const> rngs,
            std::span<int> actions) {
  if (obs.empty()) return;
  const nn::Outputs out = net.Forward(MakeInputs(obs, net.arch()), head);
  const nn::Matrix& p = head == nn::Head::kPolicySl ? out.policy_sl : out.policy_rl;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    actions[i] = SampleMasked(std::span(p.row(row).data(), static_cast<std::size_t>(p.cols())),
                              *obs[i], *rngs[i]);
  }
}

}  // namespace

NetworkPolicy::NetworkPolicy(std::shared_ptr<const nn::Network> net, nn::Head head,
                             std::string name)
    : net_(std::move(net)), head_(head), name_(std::move(name)) {
  if (head == nn::Head::kValueRl) throw std::invalid_argument("value head is not a policy");
}

void NetworkPolicy::Act(std::span<const envs::Observation* const> obs,
                        std::span<Rng* const> rngs, std::span<int> actions) const {
  Sample(*net_, head_, obs, rngs, actions);
}

void ScriptedPolicy::Act(std::span<const envs::Observation* const> obs,
                         std::span<Rng* const> rngs, std::span<int> actions) const {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    actions[i] = envs::ScriptedAction(kind_, *obs[i], *rngs[i]);
  }
}

void UniformPolicy::Act(std::span<const envs::Observation* const> obs,
                        std::span<Rng* const> rngs, std::span<int> actions) const {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    actions[i] = envs::UniformLegalAction(*obs[i], *rngs[i]);
  }
}

int RlActor(const nn::Network& net, const envs::Observation& obs, Rng& rng) {
  const envs::Observation* o = &obs;
  Rng* r = &rng;
  int a = envs::kNoAction;
  Sample(net, nn::Head::kPolicyRl, std::span(&o, 1), std::span(&r, 1), std::span(&a, 1));
  return a;
}

int SlActor(const nn::Network& net, const envs::Observation& obs, Rng& rng) {
  const envs::Observation* o = &obs;
  Rng* r = &rng;
  int a = envs::kNoAction;
  Sample(net, nn::Head::kPolicySl, std::span(&o, 1), std::span(&r, 1), std::span(&a, 1));
  return a;
}

}  // namespace nfsp::train
