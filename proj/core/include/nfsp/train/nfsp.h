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

#ifndef NFSP_TRAIN_NFSP_H_
#define NFSP_TRAIN_NFSP_H_

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "nfsp/envs/game.h"
#include "nfsp/envs/registry.h"
#include "nfsp/nn/network.h"
#include "nfsp/rl/hyperparams.h"
#include "nfsp/rl/ppo.h"
#include "nfsp/sl/reservoir.h"
#include "nfsp/sl/sl_update.h"
#include "nfsp/train/policy.h"

namespace nfsp::train {

inline constexpr int kNumProcesses = envs::kNumPlayers;

// Network, hyperparameters and counters of one learning agent. `memories`
// holds one reservoir per process whose trainer updates this bundle.
struct AgentBundle {
  nn::Network net;
  rl::Hyperparams hp;
  std::vector<sl::ReservoirBuffer> memories;
  std::int64_t rl_updates = 0;
  std::int64_t sl_updates = 0;
};

enum class Mode { kNfsp, kSelfPlay };

struct TrainConfig {
  envs::GameSpec game;
  nn::ArchSpec arch;
  rl::Hyperparams hp;
  Mode mode = Mode::kNfsp;
  // One bundle for both processes. When false each process owns a bundle
  // and its learner always takes the seat matching the process index.
  bool shared = true;
  std::uint64_t seed = 1;
  // Per-process seeds for lanes and reservoirs; derived from `seed` when unset.
  std::optional<std::array<std::uint64_t, kNumProcesses>> process_seeds;
  std::int64_t max_updates = 100;
  std::int64_t max_episodes = 0;          // 0: no episode budget
  std::int64_t max_episode_steps = 100000;  // lanes exceeding it are reset
  // Exploiter training: a single process whose opponent is this frozen
  // policy. Forces self-play style updates (no SL side).
  std::shared_ptr<const Policy> fixed_opponent;

  void Validate() const;
};

// One learner decision as stored in a rollout window.
struct Decision {
  std::vector<double> features;
  std::vector<std::uint8_t> legal;
  int action = envs::kNoAction;
  std::vector<double> policy;  // full pi_RL row
  double value = 0.0;
  double reward = 0.0;
  bool terminal = false;
  bool from_rl_actor = true;
};

struct Window {
  std::vector<Decision> rows;
  double bootstrap = 0.0;
};

struct UpdateRecord {
  std::int64_t update = 0;   // 1-based
  int process = 0;
  std::int64_t episodes = 0;  // all processes, after this update
  rl::PpoMetrics ppo;
  sl::SlMetrics sl;
  bool sl_enabled = true;
  std::int64_t buffer_size = 0;
  std::int64_t buffer_offered = 0;
  std::int64_t incidents = 0;
};

struct RunHooks {
  std::function<void(const UpdateRecord&)> on_update;
  // Called after an update once the episode count reaches each probe point.
  std::function<void(std::int64_t episodes)> on_probe;
  std::vector<std::int64_t> probe_points;
};

// Log-spaced episode counts from `start` to `budget` (inclusive), with
// `per_decade` points per factor of ten. Empty when budget < start.
std::vector<std::int64_t> LogProbeSchedule(std::int64_t start, std::int64_t budget,
                                           int per_decade);

// Builds a fresh bundle for `config`, seeding network and reservoirs.
std::vector<AgentBundle> MakeBundles(const TrainConfig& config);

// Orchestrates the learning processes. A round is a rollout phase (every
// process steps its game lanes until batch_size windows of batch_time learner
// decisions are ready, with opponents fixed to a snapshot taken at round
// start) followed by a training phase (PPO step, reservoir offers, SL step).
// Within a round every process computes its gradients at the same parameters;
// a bundle shared by both processes receives the sum of their steps.
class NfspRunner {
 public:
  explicit NfspRunner(TrainConfig config, std::optional<std::vector<AgentBundle>> bundles = {},
                      std::int64_t start_update = 0, std::int64_t start_episodes = 0);

  // Runs rounds until the update or episode budget is reached.
  void Run(const RunHooks& hooks = {});
  // One rollout + training round; returns one record per process.
  std::vector<UpdateRecord> Round();

  const TrainConfig& config() const { return config_; }
  std::vector<AgentBundle>& bundles() { return bundles_; }
  const std::vector<AgentBundle>& bundles() const { return bundles_; }
  std::int64_t updates() const { return updates_; }
  std::int64_t episodes() const { return episodes_; }
  std::int64_t incidents() const { return incidents_; }
  // Reservoir offers that did not come from the learner's RL actor.
  std::int64_t impure_offers() const { return impure_offers_; }
  int num_processes() const { return static_cast<int>(processes_.size()); }

  // Test hook: the batch the next training phase of `process` would use is
  // handed to this observer before the update.
  std::function<void(int process, const rl::TrajectoryBatch&)> batch_observer;

 private:
  struct Lane {
    std::unique_ptr<envs::GameEnv> env;
    Rng rng;
    std::array<envs::Observation, envs::kNumPlayers> obs;
    int learner = 0;
    Window window;
    bool decided = false;
    std::int64_t steps = 0;
  };
  struct Process {
    int index = 0;
    int bundle = 0;
    int opponent_bundle = 0;
    int memory = 0;
    std::vector<Lane> lanes;
    std::deque<Window> ready;
  };

  void ResetLane(const Process& p, Lane& lane);
  void StepLanes(Process& p, const Policy& opponent);
  rl::TrajectoryBatch TakeBatch(Process& p, std::vector<std::uint8_t>* from_rl);
  bool sl_enabled() const;

  TrainConfig config_;
  std::vector<AgentBundle> bundles_;
  std::vector<Process> processes_;
  std::int64_t updates_ = 0;
  std::int64_t episodes_ = 0;
  std::int64_t incidents_ = 0;
  std::int64_t impure_offers_ = 0;
};

// Convenience wrappers.
std::vector<AgentBundle> RunNfsp(TrainConfig config, const RunHooks& hooks = {});
std::vector<AgentBundle> RunSelfPlay(TrainConfig config, const RunHooks& hooks = {});

}  // namespace nfsp::train

#endif  // NFSP_TRAIN_NFSP_H_
