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

#include "nfsp/envs/micro_rts.h"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "nfsp/common/random.h"

namespace nfsp::envs {
namespace rts {

const UnitStats& Stats(UnitType type) {
  //                                 hp  cost build dmg rng atk move
  static constexpr UnitStats kBase = {40, 0, 0, 2, 3, 10, 0};
  static constexpr UnitStats kWorker = {4, 2, 100, 0, 0, 0, 0};
  static constexpr UnitStats kBarrack = {24, 4, 150, 0, 0, 0, 0};
  static constexpr UnitStats kMelee = {12, 2, 100, 3, 1, 10, 10};
  static constexpr UnitStats kRange = {6, 3, 100, 2, 3, 10, 10};
  switch (type) {
    case UnitType::kBase: return kBase;
    case UnitType::kWorker: return kWorker;
    case UnitType::kBarrack: return kBarrack;
    case UnitType::kMelee: return kMelee;
    case UnitType::kRange: return kRange;
  }
  return kBase;
}

}  // namespace rts

using rts::Stance;
using rts::UnitType;

namespace {

int Distance(int x0, int y0, int x1, int y1) {
  return std::max(std::abs(x0 - x1), std::abs(y0 - y1));
}

int Sign(int v) { return (v > 0) - (v < 0); }

bool IsAttacker(UnitType t) { return t == UnitType::kMelee || t == UnitType::kRange; }

int OwnChannel(UnitType t) { return rts::kOwnBase + static_cast<int>(t); }
int EnemyChannel(UnitType t) { return rts::kEnemyBase + static_cast<int>(t); }

// Nearest enemy of `u` (by Chebyshev distance, ties by id) satisfying `pred`.
template <typename Pred>
const Unit* NearestEnemy(const MicroRtsState& s, const Unit& u, Pred pred) {
  const Unit* best = nullptr;
  int best_d = 0;
  for (const Unit& e : s.units) {
    if (e.owner == u.owner || !pred(e)) continue;
    const int d = Distance(u.x, u.y, e.x, e.y);
    if (best == nullptr || d < best_d) {
      best = &e;
      best_d = d;
    }
  }
  return best;
}

struct Intent {
  const Unit* target = nullptr;  // attack when in range
  bool move = false;
  int goal_x = 0, goal_y = 0;
};

Intent Decide(const MicroRtsState& s, const Unit& u) {
  Intent intent;
  const PlayerState& own = s.players[u.owner];
  const PlayerState& opp = s.players[1 - u.owner];
  const rts::UnitStats& st = rts::Stats(u.type);
  if (u.type == UnitType::kBase) {
    intent.target = NearestEnemy(s, u, [&](const Unit& e) {
      return Distance(u.x, u.y, e.x, e.y) <= st.range;
    });
    return intent;
  }
  auto chase = [&](const Unit* t) {
    intent.target = t;
    if (Distance(u.x, u.y, t->x, t->y) > st.range) {
      intent.move = true;
      intent.goal_x = t->x;
      intent.goal_y = t->y;
    }
  };
  auto assault = [&]() {
    const Unit* t = NearestEnemy(s, u, [&](const Unit& e) {
      return Distance(u.x, u.y, e.x, e.y) <= rts::kSightRadius;
    });
    if (t != nullptr) {
      chase(t);
    } else {
      intent.move = true;
      intent.goal_x = opp.base_x;
      intent.goal_y = opp.base_y;
    }
  };
  switch (own.stance) {
    case Stance::kDefend: {
      const Unit* t = NearestEnemy(s, u, [&](const Unit& e) {
        return Distance(own.base_x, own.base_y, e.x, e.y) <= rts::kDefendRadius;
      });
      if (t != nullptr) {
        chase(t);
      } else if (Distance(u.x, u.y, own.base_x, own.base_y) > 1) {
        intent.move = true;
        intent.goal_x = own.base_x;
        intent.goal_y = own.base_y;
      }
      break;
    }
    case Stance::kAttack:
      assault();
      break;
    case Stance::kAttackInRange:
      intent.target = NearestEnemy(s, u, [&](const Unit& e) {
        return Distance(u.x, u.y, e.x, e.y) <= st.range;
      });
      break;
    case Stance::kHitAndRun: {
      if (u.type == UnitType::kRange) {
        const Unit* threat = NearestEnemy(
            s, u, [](const Unit& e) { return IsAttacker(e.type); });
        if (threat != nullptr && u.attack_cooldown > 0 &&
            Distance(u.x, u.y, threat->x, threat->y) <= 2) {
          intent.move = true;
          intent.goal_x = own.base_x;
          intent.goal_y = own.base_y;
          break;
        }
      }
      assault();
      break;
    }
  }
  return intent;
}

}  // namespace

void MicroRtsConfig::Validate() const {
  if (map_size < 6) throw std::invalid_argument("microrts: map_size must be >= 6");
  if (frame_skip < 1) throw std::invalid_argument("microrts: frame_skip must be >= 1");
  if (tick_limit < frame_skip) {
    throw std::invalid_argument("microrts: tick_limit must be >= frame_skip");
  }
  if (vision_radius < 1) throw std::invalid_argument("microrts: vision_radius must be >= 1");
  if (start_resources_min < 0 || start_resources_max < start_resources_min) {
    throw std::invalid_argument("microrts: bad starting resource range");
  }
}

int MicroRtsState::Count(int owner, UnitType type) const {
  int n = 0;
  for (const Unit& u : units) n += (u.owner == owner && u.type == type) ? 1 : 0;
  return n;
}

const Unit* MicroRtsState::Base(int owner) const {
  for (const Unit& u : units) {
    if (u.owner == owner && u.type == UnitType::kBase) return &u;
  }
  return nullptr;
}

std::vector<std::uint8_t> VisibilityMap(const MicroRtsState& state, int player,
                                        const MicroRtsConfig& config) {
  const int n = config.map_size;
  std::vector<std::uint8_t> vis(static_cast<std::size_t>(n * n), 0);
  for (const Unit& u : state.units) {
    if (u.owner != player) continue;
    for (int y = std::max(0, u.y - config.vision_radius);
         y <= std::min(n - 1, u.y + config.vision_radius); ++y) {
      for (int x = std::max(0, u.x - config.vision_radius);
           x <= std::min(n - 1, u.x + config.vision_radius); ++x) {
        vis[static_cast<std::size_t>(y * n + x)] = 1;
      }
    }
  }
  return vis;
}

std::vector<std::uint8_t> MicroRtsLegalActions(const MicroRtsState& s, int p) {
  std::vector<std::uint8_t> mask(rts::kNumCommands, 0);
  if (s.terminal) return mask;
  const PlayerState& ps = s.players[p];
  const int workers = s.Count(p, UnitType::kWorker);
  const int barracks = s.Count(p, UnitType::kBarrack);
  const int attackers = s.Count(p, UnitType::kMelee) + s.Count(p, UnitType::kRange) +
                        (ps.barrack_queue_ticks > 0 ? 1 : 0);
  const bool has_base = s.Base(p) != nullptr;
  mask[rts::kBuildWorker] = has_base && ps.base_queue_ticks == 0 &&
                            workers < rts::kWorkerCap &&
                            ps.resources >= rts::Stats(UnitType::kWorker).cost;
  mask[rts::kBuildBarrack] = workers > 0 && barracks == 0 && ps.barrack_build_ticks == 0 &&
                             ps.resources >= rts::Stats(UnitType::kBarrack).cost;
  const bool can_train = barracks > 0 && ps.barrack_queue_ticks == 0 &&
                         attackers < rts::kAttackerCap;
  mask[rts::kBuildMelee] = can_train && ps.resources >= rts::Stats(UnitType::kMelee).cost;
  mask[rts::kBuildRange] = can_train && ps.resources >= rts::Stats(UnitType::kRange).cost;
  for (int c = rts::kAttack; c <= rts::kIdle; ++c) mask[c] = 1;
  return mask;
}

Observation EncodeObservation(const MicroRtsState& s, int player,
                              const MicroRtsConfig& config) {
  const int n = config.map_size;
  const int plane = n * n;
  Observation obs;
  obs.game = GameKind::kMicroRts;
  obs.player = player;
  obs.tick = s.tick;
  obs.features.assign(static_cast<std::size_t>(rts::kNumChannels * plane), 0.0);
  auto at = [&](int channel, int x, int y) -> double& {
    return obs.features[static_cast<std::size_t>(channel * plane + y * n + x)];
  };
  const auto vis = VisibilityMap(s, player, config);
  auto visible = [&](int x, int y) { return vis[static_cast<std::size_t>(y * n + x)] != 0; };
  for (const Unit& u : s.units) {
    if (u.owner == player) {
      at(OwnChannel(u.type), u.x, u.y) += 1.0;
    } else if (visible(u.x, u.y)) {
      at(EnemyChannel(u.type), u.x, u.y) += 1.0;
    }
  }
  for (int p = 0; p < kNumPlayers; ++p) {
    const PlayerState& ps = s.players[p];
    if (p == player || visible(ps.resource_x, ps.resource_y)) {
      at(rts::kResource, ps.resource_x, ps.resource_y) = 1.0;
    }
  }
  const PlayerState& own = s.players[player];
  const Unit* base = s.Base(player);
  const double hp = base ? static_cast<double>(base->hp) / rts::Stats(UnitType::kBase).hp : 0.0;
  const bool offensive = own.stance == Stance::kAttack || own.stance == Stance::kHitAndRun;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      at(rts::kVisible, x, y) = visible(x, y) ? 1.0 : 0.0;
      at(rts::kOwnResources, x, y) = own.resources / 10.0;
      at(rts::kOwnBaseHp, x, y) = hp;
      at(rts::kTimeFraction, x, y) = static_cast<double>(s.tick) / config.tick_limit;
      at(rts::kOffensive, x, y) = offensive ? 1.0 : 0.0;
    }
  }
  obs.legal = MicroRtsLegalActions(s, player);
  return obs;
}

MicroRtsEnv::MicroRtsEnv(MicroRtsConfig config) : config_(config) {
  config_.Validate();
  state_.terminal = true;
}

int MicroRtsEnv::SpawnUnit(int owner, UnitType type, int x, int y) {
  CheckPlayer(owner);
  if (x < 0 || y < 0 || x >= config_.map_size || y >= config_.map_size) {
    throw std::out_of_range("microrts: unit position out of bounds");
  }
  Unit u;
  u.id = state_.next_unit_id++;
  u.type = type;
  u.owner = owner;
  u.x = x;
  u.y = y;
  u.hp = rts::Stats(type).hp;
  state_.units.push_back(u);
  return u.id;
}

std::array<Observation, kNumPlayers> MicroRtsEnv::Reset(std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, 0x727473ULL));
  state_ = MicroRtsState();
  const int n = config_.map_size;
  for (int p = 0; p < kNumPlayers; ++p) {
    PlayerState& ps = state_.players[p];
    // Player 0 spawns near the top-left corner, player 1 near the bottom-right.
    const int lo = p == 0 ? 1 : n - 3;
    ps.base_x = lo + static_cast<int>(UniformIndex(rng, 2));
    ps.base_y = lo + static_cast<int>(UniformIndex(rng, 2));
    static constexpr int kRing[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                        {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    const auto* off = kRing[UniformIndex(rng, 8)];
    ps.resource_x = std::clamp(ps.base_x + off[0], 0, n - 1);
    ps.resource_y = std::clamp(ps.base_y + off[1], 0, n - 1);
    ps.resources = config_.start_resources_min +
                   static_cast<int>(UniformIndex(
                       rng, static_cast<std::uint64_t>(config_.start_resources_max -
                                                       config_.start_resources_min + 1)));
    SpawnUnit(p, UnitType::kBase, ps.base_x, ps.base_y);
    SpawnUnit(p, UnitType::kWorker, ps.resource_x, ps.resource_y);
    const int dir = p == 0 ? 1 : -1;
    if (UniformUnit(rng) < config_.start_barrack_prob) {
      SpawnUnit(p, UnitType::kBarrack, ps.base_x + dir, ps.base_y + dir);
    }
    if (UniformUnit(rng) < config_.start_melee_prob) {
      SpawnUnit(p, UnitType::kMelee, ps.base_x, ps.base_y);
    }
  }
  return {Observe(0), Observe(1)};
}

Observation MicroRtsEnv::Observe(int player) const {
  CheckPlayer(player);
  return EncodeObservation(state_, player, config_);
}

bool MicroRtsEnv::IsActive(int player) const {
  return !state_.terminal && player >= 0 && player < kNumPlayers;
}

std::vector<std::uint8_t> MicroRtsEnv::DoLegalActions(int player) const {
  return MicroRtsLegalActions(state_, player);
}

std::unique_ptr<GameEnv> MicroRtsEnv::Clone() const {
  return std::make_unique<MicroRtsEnv>(*this);
}

void MicroRtsEnv::ApplyCommand(int p, int command) {
  PlayerState& ps = state_.players[p];
  switch (command) {
    case rts::kBuildWorker:
      ps.resources -= rts::Stats(UnitType::kWorker).cost;
      ps.base_queue_ticks = rts::Stats(UnitType::kWorker).build_ticks;
      break;
    case rts::kBuildBarrack:
      ps.resources -= rts::Stats(UnitType::kBarrack).cost;
      ps.barrack_build_ticks = rts::Stats(UnitType::kBarrack).build_ticks;
      break;
    case rts::kBuildMelee:
    case rts::kBuildRange: {
      const UnitType t = command == rts::kBuildMelee ? UnitType::kMelee : UnitType::kRange;
      ps.resources -= rts::Stats(t).cost;
      ps.barrack_queue_ticks = rts::Stats(t).build_ticks;
      ps.barrack_queue_type = t;
      break;
    }
    case rts::kAttack: ps.stance = Stance::kAttack; break;
    case rts::kAttackInRange: ps.stance = Stance::kAttackInRange; break;
    case rts::kHitAndRun: ps.stance = Stance::kHitAndRun; break;
    case rts::kAllDefend: ps.stance = Stance::kDefend; break;
    case rts::kIdle: break;
  }
}

void MicroRtsEnv::Produce(int p) {
  PlayerState& ps = state_.players[p];
  const int dir = p == 0 ? 1 : -1;
  const int n = config_.map_size;
  if (ps.base_queue_ticks > 0 && --ps.base_queue_ticks == 0 && state_.Base(p) != nullptr) {
    SpawnUnit(p, UnitType::kWorker, ps.resource_x, ps.resource_y);
  }
  if (ps.barrack_build_ticks > 0 && --ps.barrack_build_ticks == 0) {
    SpawnUnit(p, UnitType::kBarrack, std::clamp(ps.base_x + dir, 0, n - 1),
              std::clamp(ps.base_y + dir, 0, n - 1));
  }
  if (ps.barrack_queue_ticks > 0) {
    const Unit* barrack = nullptr;
    for (const Unit& u : state_.units) {
      if (u.owner == p && u.type == UnitType::kBarrack) {
        barrack = &u;
        break;
      }
    }
    if (barrack == nullptr) {
      ps.barrack_queue_ticks = 0;  // barrack destroyed, order lost
    } else if (--ps.barrack_queue_ticks == 0) {
      const int bx = barrack->x, by = barrack->y;
      SpawnUnit(p, ps.barrack_queue_type, bx, by);
    }
  }
}

void MicroRtsEnv::Combat() {
  std::vector<int> damage(state_.units.size(), 0);
  auto index_of = [&](const Unit* t) {
    return static_cast<std::size_t>(t - state_.units.data());
  };
  for (Unit& u : state_.units) {
    if (rts::Stats(u.type).damage == 0) continue;
    if (u.attack_cooldown > 0) --u.attack_cooldown;
    const Intent intent = Decide(state_, u);
    if (intent.target == nullptr) continue;
    const rts::UnitStats& st = rts::Stats(u.type);
    if (u.attack_cooldown == 0 &&
        Distance(u.x, u.y, intent.target->x, intent.target->y) <= st.range) {
      damage[index_of(intent.target)] += st.damage;
      u.attack_cooldown = st.attack_period;
    }
  }
  for (std::size_t i = 0; i < state_.units.size(); ++i) {
    state_.units[i].hp = std::max(0, state_.units[i].hp - damage[i]);
  }
  std::erase_if(state_.units, [](const Unit& u) { return u.hp <= 0; });
}

void MicroRtsEnv::Move() {
  const int n = config_.map_size;
  std::vector<std::pair<int, int>> moves(state_.units.size(), {0, 0});
  for (std::size_t i = 0; i < state_.units.size(); ++i) {
    Unit& u = state_.units[i];
    if (!IsAttacker(u.type)) continue;
    if (u.move_cooldown > 0) {
      --u.move_cooldown;
      continue;
    }
    const Intent intent = Decide(state_, u);
    if (!intent.move) continue;
    const int dx = Sign(intent.goal_x - u.x), dy = Sign(intent.goal_y - u.y);
    if (dx == 0 && dy == 0) continue;
    moves[i] = {dx, dy};
  }
  for (std::size_t i = 0; i < state_.units.size(); ++i) {
    if (moves[i] == std::pair<int, int>{0, 0}) continue;
    Unit& u = state_.units[i];
    u.x = std::clamp(u.x + moves[i].first, 0, n - 1);
    u.y = std::clamp(u.y + moves[i].second, 0, n - 1);
    u.move_cooldown = rts::Stats(u.type).move_period;
  }
}

void MicroRtsEnv::CheckTerminal() {
  const bool alive0 = state_.Base(0) != nullptr;
  const bool alive1 = state_.Base(1) != nullptr;
  if (alive0 && alive1) {
    if (state_.tick >= config_.tick_limit) {
      state_.terminal = true;
      state_.outcome = {0.0, 0.0};
    }
    return;
  }
  state_.terminal = true;
  if (alive0) {
    state_.outcome = {1.0, -1.0};
  } else if (alive1) {
    state_.outcome = {-1.0, 1.0};
  } else {
    state_.outcome = {0.0, 0.0};
  }
}

void MicroRtsEnv::Tick() {
  if (state_.terminal) return;
  ++state_.tick;
  for (int p = 0; p < kNumPlayers; ++p) Produce(p);
  if (state_.tick % rts::kIncomePeriod == 0) {
    for (int p = 0; p < kNumPlayers; ++p) {
      if (state_.Base(p) == nullptr) continue;
      state_.players[p].resources += 1 + state_.Count(p, UnitType::kWorker);
    }
  }
  Combat();
  Move();
  CheckTerminal();
}

StepResult MicroRtsEnv::DoStep(const JointAction& actions) {
  for (int p = 0; p < kNumPlayers; ++p) ApplyCommand(p, actions[p]);
  for (int k = 0; k < config_.frame_skip && !state_.terminal; ++k) Tick();
  StepResult result;
  result.terminal = state_.terminal;
  if (result.terminal) result.rewards = state_.outcome;
  result.observations = {Observe(0), Observe(1)};
  return result;
}

}  // namespace nfsp::envs
