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

#ifndef NFSP_RL_HYPERPARAMS_H_
#define NFSP_RL_HYPERPARAMS_H_

#include <cstdint>

namespace nfsp::rl {

struct Hyperparams {
  double clip_eps = 0.2;         // policy ratio clip
  double value_clip = 0.1;       // value clip
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double gamma = 0.99;
  double gae_decay = 0.95;
  double lr_rl = 0.01;
  double lr_sl = 0.001;
  int batch_size = 128;          // lanes per update
  int batch_time = 50;           // learner decisions per lane per update
  int frame_skip = 50;
  int games_per_process = 512;
  std::int64_t reservoir_capacity = 1 << 17;
  int sl_sample = 512;
  double eta = 0.1;              // kept for reference; not used by process-level roles
  double max_grad_norm = 0.5;
  int epochs = 1;

  // Throws ConfigError naming the field and its allowed range.
  void Validate() const;
};

}  // namespace nfsp::rl

#endif  // NFSP_RL_HYPERPARAMS_H_
