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

#ifndef NFSP_TRAIN_POLICY_H_
#define NFSP_TRAIN_POLICY_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nfsp/common/random.h"
#include "nfsp/envs/game.h"
#include "nfsp/envs/scripted.h"
#include "nfsp/nn/network.h"

namespace nfsp::train {

// Batched acting interface shared by training opponents and evaluation.
// rngs[i] drives any sampling for obs[i].
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void Act(std::span<const envs::Observation* const> obs, std::span<Rng* const> rngs,
                   std::span<int> actions) const = 0;

  int ActOne(const envs::Observation& obs, Rng& rng) const;
};

// Stacks observation features and legal masks into network inputs. Throws
// std::invalid_argument with expected vs actual sizes on a mismatch.
nn::Inputs MakeInputs(std::span<const envs::Observation* const> obs, const nn::ArchSpec& arch);

// Samples from `probs` restricted to the legal entries of `obs`. When that
// leaves no mass, logs a warning and samples uniformly over the legal set.
int SampleMasked(std::span<const double> probs, const envs::Observation& obs, Rng& rng);

// Samples from one policy head of a network.
class NetworkPolicy : public Policy {
 public:
  NetworkPolicy(std::shared_ptr<const nn::Network> net, nn::Head head, std::string name);
  std::string name() const override { return name_; }
  void Act(std::span<const envs::Observation* const> obs, std::span<Rng* const> rngs,
           std::span<int> actions) const override;
  const nn::Network& network() const { return *net_; }
  nn::Head head() const { return head_; }

 private:
  std::shared_ptr<const nn::Network> net_;
  nn::Head head_;
  std::string name_;
};

class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(envs::ScriptKind kind) : kind_(kind) {}
  std::string name() const override { return envs::ScriptName(kind_); }
  void Act(std::span<const envs::Observation* const> obs, std::span<Rng* const> rngs,
           std::span<int> actions) const override;

 private:
  envs::ScriptKind kind_;
};

class UniformPolicy : public Policy {
 public:
  std::string name() const override { return "uniform"; }
  void Act(std::span<const envs::Observation* const> obs, std::span<Rng* const> rngs,
           std::span<int> actions) const override;
};

// Single-observation actors: sample from pi_RL or pi_SL over legal actions.
int RlActor(const nn::Network& net, const envs::Observation& obs, Rng& rng);
int SlActor(const nn::Network& net, const envs::Observation& obs, Rng& rng);

}  // namespace nfsp::train

#endif  // NFSP_TRAIN_POLICY_H_
