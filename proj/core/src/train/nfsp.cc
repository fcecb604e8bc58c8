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

#include "nfsp/train/nfsp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "nfsp/common/error.h"

namespace nfsp::train {
namespace {

std::uint64_t ProcessSeed(const TrainConfig& c, int p) {
  if (c.process_seeds) return (*c.process_seeds)[p];
  return DeriveSeed(c.seed, 0x70726f63ULL + static_cast<std::uint64_t>(p));
}

int NumProcesses(const TrainConfig& c) { return c.fixed_opponent ? 1 : kNumProcesses; }

int NumBundles(const TrainConfig& c) { return (c.shared || c.fixed_opponent) ? 1 : kNumProcesses; }

}  // namespace

void TrainConfig::Validate() const {
  hp.Validate();
  try {
    arch.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (max_updates < 0 || max_episodes < 0) throw ConfigError("budgets must be >= 0");
  if (max_updates == 0 && max_episodes == 0) {
    throw ConfigError("updates or episodes must set a positive budget");
  }
  if (max_episode_steps < 1) throw ConfigError("max_episode_steps must be >= 1");
  std::unique_ptr<envs::GameEnv> env;
  try {
    env = envs::MakeGame(game);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (env->observation_shape().size() != arch.InputSize()) {
    throw ConfigError("network input size " + std::to_string(arch.InputSize()) +
                      " does not match the " + game.name + " observation size " +
                      std::to_string(env->observation_shape().size()));
  }
  if (env->num_actions() != arch.num_actions) {
    throw ConfigError("network action count " + std::to_string(arch.num_actions) +
                      " does not match the " + game.name + " action count " +
                      std::to_string(env->num_actions()));
  }
}

std::vector<std::int64_t> LogProbeSchedule(std::int64_t start, std::int64_t budget,
                                           int per_decade) {
  std::vector<std::int64_t> out;
  if (start < 1 || budget < start || per_decade < 1) return out;
  const double lo = std::log10(static_cast<double>(start));
  const double hi = std::log10(static_cast<double>(budget));
  const int n = static_cast<int>(std::floor((hi - lo) * per_decade + 1e-9));
  for (int i = 0; i <= n; ++i) {
    const auto v = static_cast<std::int64_t>(std::llround(std::pow(10.0, lo + i / static_cast<double>(per_decade))));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  if (out.back() != budget) out.push_back(budget);
  return out;
}

std::vector<AgentBundle> MakeBundles(const TrainConfig& config) {
  std::unique_ptr<envs::GameEnv> env = envs::MakeGame(config.game);
  const int features = env->observation_shape().size();
  std::vector<AgentBundle> out;
  const int bundles = NumBundles(config);
  for (int b = 0; b < bundles; ++b) {
    AgentBundle bundle{nn::Network::Build(config.arch, DeriveSeed(config.seed, 0x6e6574ULL + b)),
                       config.hp, {}, 0, 0};
    const int memories = (config.shared && !config.fixed_opponent) ? kNumProcesses : 1;
    for (int m = 0; m < memories; ++m) {
      const int process = bundles == 1 ? m : b;
      bundle.memories.emplace_back(config.hp.reservoir_capacity, features, env->num_actions(),
                                   DeriveSeed(ProcessSeed(config, process), 0x727262ULL));
    }
    out.push_back(std::move(bundle));
  }
  return out;
}

NfspRunner::NfspRunner(TrainConfig config, std::optional<std::vector<AgentBundle>> bundles,
                       std::int64_t start_update, std::int64_t start_episodes)
    : config_(std::move(config)), updates_(start_update), episodes_(start_episodes) {
  config_.game.microrts.frame_skip = config_.hp.frame_skip;
  if (config_.fixed_opponent) config_.mode = Mode::kSelfPlay;
  config_.Validate();
  bundles_ = bundles ? std::move(*bundles) : MakeBundles(config_);
  if (static_cast<int>(bundles_.size()) != NumBundles(config_)) {
    throw ConfigError("bundle count does not match the sharing mode");
  }
  for (const AgentBundle& b : bundles_) {
    if (!(b.net.arch() == config_.arch)) throw ConfigError("bundle architecture mismatch");
  }
  const int n = NumProcesses(config_);
  processes_ = std::vector<Process>(n);
  for (int p = 0; p < n; ++p) {
    Process& proc = processes_[p];
    proc.index = p;
    proc.bundle = NumBundles(config_) == 1 ? 0 : p;
    proc.opponent_bundle = NumBundles(config_) == 1 ? 0 : 1 - p;
    proc.memory = static_cast<int>(bundles_[proc.bundle].memories.size()) > 1 ? p : 0;
    const std::uint64_t seed = ProcessSeed(config_, p);
    proc.lanes.resize(config_.hp.games_per_process);
    for (int l = 0; l < config_.hp.games_per_process; ++l) {
      Lane& lane = proc.lanes[l];
      lane.env = envs::MakeGame(config_.game);
      lane.rng.seed(DeriveSeed(seed, static_cast<std::uint64_t>(l)));
      ResetLane(proc, lane);
    }
  }
}

bool NfspRunner::sl_enabled() const { return config_.mode == Mode::kNfsp; }

void NfspRunner::ResetLane(const Process& p, Lane& lane) {
  lane.obs = lane.env->Reset(lane.rng());
  lane.learner = (config_.shared || config_.fixed_opponent)
                     ? static_cast<int>(UniformIndex(lane.rng, envs::kNumPlayers))
                     : p.index;
  lane.decided = false;
  lane.steps = 0;
}

void NfspRunner::StepLanes(Process& p, const Policy& opponent) {
  const int T = config_.hp.batch_time;
  const nn::Network& net = bundles_[p.bundle].net;
  std::vector<const envs::Observation*> l_obs, o_obs;
  std::vector<int> l_lane, o_lane, o_seat;
  std::vector<Rng*> o_rng;
  for (int i = 0; i < static_cast<int>(p.lanes.size()); ++i) {
    Lane& lane = p.lanes[i];
    for (int seat = 0; seat < envs::kNumPlayers; ++seat) {
      if (!lane.env->IsActive(seat)) continue;
      if (seat == lane.learner) {
        l_obs.push_back(&lane.obs[seat]);
        l_lane.push_back(i);
      } else {
        o_obs.push_back(&lane.obs[seat]);
        o_lane.push_back(i);
        o_seat.push_back(seat);
        o_rng.push_back(&lane.rng);
      }
    }
  }
  std::vector<envs::JointAction> joint(p.lanes.size(), {envs::kNoAction, envs::kNoAction});
  std::vector<int> o_act(o_obs.size());
  opponent.Act(o_obs, o_rng, o_act);
  for (std::size_t k = 0; k < o_obs.size(); ++k) joint[o_lane[k]][o_seat[k]] = o_act[k];

  if (!l_obs.empty()) {
    const nn::Outputs out = net.Forward(MakeInputs(l_obs, net.arch()), nn::HeadSet::Rl());
    const auto A = static_cast<std::size_t>(out.policy_rl.cols());
    for (std::size_t k = 0; k < l_obs.size(); ++k) {
      Lane& lane = p.lanes[l_lane[k]];
      const auto row = static_cast<Eigen::Index>(k);
      std::span<const double> probs(out.policy_rl.row(row).data(), A);
      const envs::Observation& o = *l_obs[k];
      Decision d;
      d.action = SampleMasked(probs, o, lane.rng);
      d.features = o.features;
      d.legal = o.legal;
      d.policy.assign(probs.begin(), probs.end());
      d.value = out.value(row);
      if (static_cast<int>(lane.window.rows.size()) == T) {
        lane.window.bootstrap = d.value;
        p.ready.push_back(std::move(lane.window));
        lane.window = Window();
      }
      joint[l_lane[k]][lane.learner] = d.action;
      lane.window.rows.push_back(std::move(d));
      lane.decided = true;
    }
  }

  for (std::size_t i = 0; i < p.lanes.size(); ++i) {
    Lane& lane = p.lanes[i];
    envs::StepResult r;
    try {
      r = lane.env->Step(joint[i]);
    } catch (const std::exception& e) {
      ++incidents_;
      spdlog::warn("process {} lane {}: environment fault ({}); restarting lane", p.index, i,
                   e.what());
      lane.window = Window();
      ResetLane(p, lane);
      continue;
    }
    ++lane.steps;
    if (lane.decided) lane.window.rows.back().reward += r.rewards[lane.learner];
    lane.obs = r.observations;
    if (r.terminal) {
      ++episodes_;
      if (lane.decided) {
        lane.window.rows.back().terminal = true;
        if (static_cast<int>(lane.window.rows.size()) == T) {
          lane.window.bootstrap = 0.0;
          p.ready.push_back(std::move(lane.window));
          lane.window = Window();
        }
      }
      ResetLane(p, lane);
    } else if (lane.steps >= config_.max_episode_steps) {
      ++incidents_;
      spdlog::warn("process {} lane {}: no terminal after {} steps; restarting lane", p.index, i,
                   lane.steps);
      lane.window = Window();
      ResetLane(p, lane);
    }
  }
}

rl::TrajectoryBatch NfspRunner::TakeBatch(Process& p, std::vector<std::uint8_t>* from_rl) {
  const int lanes = config_.hp.batch_size, T = config_.hp.batch_time;
  const int F = config_.arch.InputSize(), A = config_.arch.num_actions;
  rl::TrajectoryBatch b;
  b.lanes = lanes;
  b.steps = T;
  const int n = lanes * T;
  b.states.resize(n, F);
  b.legal.resize(n, A);
  b.old_policy.resize(n, A);
  b.actions.resize(n);
  b.rewards.resize(n);
  b.values_old.resize(n);
  b.terminal.resize(n);
  b.bootstrap.resize(lanes);
  from_rl->assign(n, 0);
  for (int l = 0; l < lanes; ++l) {
    Window w = std::move(p.ready.front());
    p.ready.pop_front();
    b.bootstrap[l] = w.bootstrap;
    for (int t = 0; t < T; ++t) {
      const Decision& d = w.rows[t];
      const int row = l * T + t;
      for (int j = 0; j < F; ++j) b.states(row, j) = d.features[j];
      for (int j = 0; j < A; ++j) {
        b.legal(row, j) = d.legal[j];
        b.old_policy(row, j) = d.policy[j];
      }
      b.actions[row] = d.action;
      b.rewards[row] = d.reward;
      b.values_old[row] = d.value;
      b.terminal[row] = d.terminal ? 1 : 0;
      (*from_rl)[row] = d.from_rl_actor ? 1 : 0;
    }
  }
  return b;
}

std::vector<UpdateRecord> NfspRunner::Round() {
  const rl::Hyperparams& h = config_.hp;
  const int n = num_processes();

  // Rollout phase against a frozen snapshot of each opponent.
  std::vector<std::shared_ptr<const Policy>> opponents(n);
  for (int p = 0; p < n; ++p) {
    if (config_.fixed_opponent) {
      opponents[p] = config_.fixed_opponent;
      continue;
    }
    auto snap = std::make_shared<const nn::Network>(bundles_[processes_[p].opponent_bundle].net);
    opponents[p] = std::make_shared<NetworkPolicy>(
        snap, sl_enabled() ? nn::Head::kPolicySl : nn::Head::kPolicyRl, "snapshot");
  }
  for (int p = 0; p < n; ++p) {
    while (static_cast<int>(processes_[p].ready.size()) < h.batch_size) {
      StepLanes(processes_[p], *opponents[p]);
    }
  }

  // Training phase. Gradients of every process are taken at the same
  // parameters and summed per bundle.
  std::vector<UpdateRecord> records(n);
  std::vector<rl::TrajectoryBatch> batches(n);
  std::vector<nn::GradientSet> rl_grads(n), sl_grads(n);
  for (int p = 0; p < n; ++p) {
    Process& proc = processes_[p];
    AgentBundle& bundle = bundles_[proc.bundle];
    std::vector<std::uint8_t> from_rl;
    batches[p] = TakeBatch(proc, &from_rl);
    if (batch_observer) batch_observer(p, batches[p]);
    rl::PpoGradient g = rl::PpoGradientFor(bundle.net, batches[p], h);
    records[p].ppo = g.metrics;
    rl_grads[p] = std::move(g.grads);
    records[p].process = p;
    records[p].sl_enabled = sl_enabled();
    if (!sl_enabled()) continue;
    sl::ReservoirBuffer& memory = bundle.memories[proc.memory];
    const rl::TrajectoryBatch& b = batches[p];
    for (int row = 0; row < b.size(); ++row) {
      if (!from_rl[row]) {
        ++impure_offers_;
        continue;
      }
      std::vector<std::uint8_t> legal(static_cast<std::size_t>(b.legal.cols()));
      for (Eigen::Index j = 0; j < b.legal.cols(); ++j) legal[j] = b.legal(row, j) > 0.5;
      memory.Insert(std::span(b.states.row(row).data(), static_cast<std::size_t>(b.states.cols())),
                    legal,
                    std::span(b.old_policy.row(row).data(),
                              static_cast<std::size_t>(b.old_policy.cols())));
    }
    if (memory.size() > 0) {
      sl::SlGradient sg = sl::SlGradientFor(bundle.net, memory.Sample(h.sl_sample), h);
      records[p].sl = sg.metrics;
      if (!sg.metrics.skipped) sl_grads[p] = std::move(sg.grads);
    } else {
      records[p].sl.skipped = true;
    }
    records[p].buffer_size = memory.size();
    records[p].buffer_offered = memory.offered();
  }

  auto apply = [&](int bundle, const std::vector<nn::GradientSet>& grads, double lr) {
    const nn::GradientSet* a = nullptr;
    const nn::GradientSet* c = nullptr;
    for (int p = 0; p < n; ++p) {
      if (processes_[p].bundle != bundle || grads[p].size() == 0) continue;
      (a == nullptr ? a : c) = &grads[p];
    }
    if (a == nullptr) return;
    std::span<double> params = bundles_[bundle].net.mutable_params();
    if (c == nullptr) {
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * (*a)[i];
    } else {
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * ((*a)[i] + (*c)[i]);
    }
  };
  for (int b = 0; b < static_cast<int>(bundles_.size()); ++b) {
    apply(b, rl_grads, h.lr_rl);
    apply(b, sl_grads, h.lr_sl);
    ++bundles_[b].rl_updates;
    if (sl_enabled()) ++bundles_[b].sl_updates;
  }
  for (int e = 1; e < h.epochs; ++e) {
    for (int p = 0; p < n; ++p) {
      rl::PpoGradient g = rl::PpoGradientFor(bundles_[processes_[p].bundle].net, batches[p], h);
      rl_grads[p] = g.metrics.aborted ? nn::GradientSet() : std::move(g.grads);
    }
    for (int b = 0; b < static_cast<int>(bundles_.size()); ++b) apply(b, rl_grads, h.lr_rl);
  }

  ++updates_;
  for (UpdateRecord& r : records) {
    r.update = updates_;
    r.episodes = episodes_;
    r.incidents = incidents_;
  }
  return records;
}

void NfspRunner::Run(const RunHooks& hooks) {
  std::size_t next_probe = 0;
  while (next_probe < hooks.probe_points.size() && hooks.probe_points[next_probe] <= episodes_) {
    ++next_probe;
  }
  while ((config_.max_updates == 0 || updates_ < config_.max_updates) &&
         (config_.max_episodes == 0 || episodes_ < config_.max_episodes)) {
    const std::vector<UpdateRecord> records = Round();
    if (hooks.on_update) {
      for (const UpdateRecord& r : records) hooks.on_update(r);
    }
    bool crossed = false;
    while (next_probe < hooks.probe_points.size() &&
           hooks.probe_points[next_probe] <= episodes_) {
      ++next_probe;
      crossed = true;
    }
    if (crossed && hooks.on_probe) hooks.on_probe(episodes_);
  }
}

std::vector<AgentBundle> RunNfsp(TrainConfig config, const RunHooks& hooks) {
  config.mode = Mode::kNfsp;
  NfspRunner runner(std::move(config));
  runner.Run(hooks);
  return std::move(runner.bundles());
}

std::vector<AgentBundle> RunSelfPlay(TrainConfig config, const RunHooks& hooks) {
  config.mode = Mode::kSelfPlay;
  NfspRunner runner(std::move(config));
  runner.Run(hooks);
  return std::move(runner.bundles());
}

}  // namespace nfsp::train
