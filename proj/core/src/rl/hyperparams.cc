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

#include "nfsp/rl/hyperparams.h"

#include <string>

#include "nfsp/common/error.h"

namespace nfsp::rl {
namespace {

void Require(bool ok, const char* field, const char* range) {
  if (!ok) throw ConfigError(std::string(field) + " must be " + range);
}

}  // namespace

void Hyperparams::Validate() const {
  Require(clip_eps > 0.0, "clip_eps", "> 0");
  Require(value_clip > 0.0, "value_clip", "> 0");
  Require(entropy_coef >= 0.0, "entropy_coef", ">= 0");
  Require(value_coef >= 0.0, "value_coef", ">= 0");
  Require(gamma > 0.0 && gamma <= 1.0, "gamma", "in (0, 1]");
  Require(gae_decay > 0.0 && gae_decay <= 1.0, "gae_decay", "in (0, 1]");
  Require(lr_rl > 0.0, "lr_rl", "> 0");
  Require(lr_sl > 0.0, "lr_sl", "> 0");
  Require(batch_size >= 1, "batch_size", ">= 1");
  Require(batch_time >= 1, "batch_time", ">= 1");
  Require(batch_size * batch_time >= 2, "batch_size * batch_time", ">= 2");
  Require(frame_skip >= 1, "frame_skip", ">= 1");
  Require(games_per_process >= batch_size, "games_per_process", ">= batch_size");
  Require(reservoir_capacity >= 1, "reservoir_capacity", ">= 1");
  Require(sl_sample >= 1, "sl_sample", ">= 1");
  Require(eta >= 0.0 && eta <= 1.0, "eta", "in [0, 1]");
  Require(max_grad_norm > 0.0, "max_grad_norm", "> 0");
  Require(epochs >= 1, "epochs", ">= 1");
}

}  // namespace nfsp::rl
