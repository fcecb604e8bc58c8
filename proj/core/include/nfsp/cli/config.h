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

#ifndef NFSP_CLI_CONFIG_H_
#define NFSP_CLI_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nfsp/envs/registry.h"
#include "nfsp/nn/network.h"
#include "nfsp/rl/hyperparams.h"
#include "nfsp/train/nfsp.h"

namespace nfsp::cli {

enum class Source { kDefault, kFile, kFlag };
std::string SourceName(Source s);

// Every knob of a run. Keys, types and defaults are listed by ConfigKeys();
// the hyperparameter defaults are those of rl::Hyperparams.
struct RunConfig {
  std::string command = "train";  // train | pretrain | eval | exploit | curve | nashconv
  std::string env = "kuhn";
  std::string mode = "nfsp";      // nfsp | selfplay | pretrain-then-nfsp
  bool shared = true;
  std::uint64_t seed = 1;
  std::int64_t updates = 100;
  std::int64_t episodes = 0;
  std::int64_t max_episode_steps = 100000;
  std::string out;                // run directory; empty: derived under the output root
  std::string resume;             // run directory to continue
  std::int64_t checkpoint_every = 0;

  rl::Hyperparams hp;

  std::string arch = "auto";      // auto | mlp | conv
  int blocks = 0;                 // 0: game default
  int width = 0;                  // 0: game default
  int pool_every = 2;
  double leaky_slope = 0.1;
  std::string norm = "frozen";    // frozen | batch

  int map_size = 10;
  int tick_limit = 3000;
  int vision_radius = 3;

  std::string probe_opponents = "auto";
  std::int64_t probe_games = 200;
  int probe_per_decade = 4;
  std::int64_t probe_start = 1000;

  std::int64_t pretrain_updates = 50;
  bool transfer_sl = true;
  bool transfer_value = true;

  std::string checkpoint;         // eval / nashconv / pretrain output
  std::string target;             // exploit: checkpoint path or scripted name
  std::string opponent = "simple";  // eval: scripted name or checkpoint path
  std::string head = "auto";      // auto | sl | rl
  std::int64_t games = 1000;
  std::uint64_t eval_seed = 12345;
  std::string metrics;            // curve input

  std::map<std::string, Source> provenance;

  bool operator==(const RunConfig& o) const;
};

struct KeyInfo {
  std::string key;
  std::string type;  // int | real | bool | string
  std::string help;
};
const std::vector<KeyInfo>& ConfigKeys();

// Applies one key=value. Throws ConfigError naming the key and the expected
// form on unknown keys or malformed values.
void SetKey(RunConfig& config, const std::string& key, const std::string& value, Source source);
std::string GetKey(const RunConfig& config, const std::string& key);

// Parses "key=value" lines; '#' starts a comment, blank lines are ignored.
void ApplyText(RunConfig& config, const std::string& text, Source source);

// Defaults, then `file_text`, then flags ("--key=value" or "--key value" or
// "key=value"). Validates the result.
RunConfig ParseConfig(const std::string& file_text, const std::vector<std::string>& flags);

// Full key=value listing with a provenance comment per line; ParseConfig of
// the output reproduces every value.
std::string EmitConfig(const RunConfig& config);

// Throws ConfigError on violated invariants (gamma in (0, 1], ...).
void ValidateConfig(const RunConfig& config);

// Derived objects.
envs::GameSpec MakeGameSpec(const RunConfig& config);
nn::ArchSpec MakeArch(const RunConfig& config);
train::TrainConfig MakeTrainConfig(const RunConfig& config);

}  // namespace nfsp::cli

#endif  // NFSP_CLI_CONFIG_H_
