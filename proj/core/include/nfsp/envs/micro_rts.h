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

#ifndef NFSP_ENVS_MICRO_RTS_H_
#define NFSP_ENVS_MICRO_RTS_H_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nfsp/envs/game.h"

namespace nfsp::envs {

// MicroRTS-lite: a tick-driven two-player RTS on a small grid with fog of war,
// an economy (base and workers produce resources), a production chain
// (worker -> barrack -> melee/range attackers) and nine global strategic
// commands. Each decision is held for `frame_skip` engine ticks.
namespace rts {

enum Command : int {
  kBuildWorker = 0,
  kBuildBarrack = 1,
  kBuildMelee = 2,
  kBuildRange = 3,
  kAttack = 4,
  kAttackInRange = 5,
  kHitAndRun = 6,
  kAllDefend = 7,
  kIdle = 8,
};
inline constexpr int kNumCommands = 9;

enum class UnitType : int { kBase = 0, kWorker, kBarrack, kMelee, kRange };
inline constexpr int kNumUnitTypes = 5;

// Tactical stance shared by every attacker of a player.
enum class Stance : int { kDefend = 0, kAttack, kAttackInRange, kHitAndRun };

struct UnitStats {
  int hp;
  int cost;
  int build_ticks;
  int damage;
  int range;          // Chebyshev distance
  int attack_period;  // ticks between attacks
  int move_period;    // ticks per cell
};

// Engine constants, tuned for a 10x10 map and frame skip 50. The base is a
// weak turret (damage 2 within range 3), so an undefended rush is not free.
const UnitStats& Stats(UnitType type);
inline constexpr int kIncomePeriod = 50;     // +1 per worker and +1 base income
inline constexpr int kWorkerCap = 3;
inline constexpr int kAttackerCap = 8;
inline constexpr int kDefendRadius = 3;      // defenders engage threats this close to base
inline constexpr int kSightRadius = 3;       // attackers acquire targets this far away

// Observation channels, each a map_size x map_size plane.
enum Channel : int {
  kOwnBase = 0,
  kOwnWorker,
  kOwnBarrack,
  kOwnMelee,
  kOwnRange,
  kEnemyBase,
  kEnemyWorker,
  kEnemyBarrack,
  kEnemyMelee,
  kEnemyRange,
  kResource,
  kVisible,
  kOwnResources,  // broadcast: resources / 10
  kOwnBaseHp,     // broadcast: base hp fraction
  kTimeFraction,  // broadcast: tick / tick_limit
  kOffensive,     // broadcast: 1 when the stance is attack or hit-and-run
};
inline constexpr int kNumChannels = 16;

}  // namespace rts

struct MicroRtsConfig {
  int map_size = 10;
  int frame_skip = 50;
  int tick_limit = 3000;
  int vision_radius = 3;
  int start_resources_min = 3;
  int start_resources_max = 5;
  // Probability that a player starts with a completed barrack / one melee unit.
  double start_barrack_prob = 0.3;
  double start_melee_prob = 0.3;

  void Validate() const;
};

struct Unit {
  int id = 0;
  rts::UnitType type = rts::UnitType::kWorker;
  int owner = 0;
  int x = 0;
  int y = 0;
  int hp = 0;
  int attack_cooldown = 0;
  int move_cooldown = 0;
};

struct PlayerState {
  int resources = 0;
  rts::Stance stance = rts::Stance::kDefend;
  int base_x = 0, base_y = 0;
  int resource_x = 0, resource_y = 0;
  int base_queue_ticks = 0;        // > 0 while a worker is being trained
  int barrack_build_ticks = 0;     // > 0 while a barrack is under construction
  int barrack_queue_ticks = 0;     // > 0 while an attacker is being trained
  rts::UnitType barrack_queue_type = rts::UnitType::kMelee;
};

struct MicroRtsState {
  int tick = 0;
  std::array<PlayerState, kNumPlayers> players;
  std::vector<Unit> units;  // bases included; dead units are removed
  int next_unit_id = 0;
  bool terminal = false;
  Rewards outcome{};

  int Count(int owner, rts::UnitType type) const;
  const Unit* Base(int owner) const;
};

// Cells visible to `player`: within vision radius (Chebyshev) of any own unit.
std::vector<std::uint8_t> VisibilityMap(const MicroRtsState& state, int player,
                                        const MicroRtsConfig& config);

// Channelised counts for own units; enemy channels are zero outside the
// player's visibility.
Observation EncodeObservation(const MicroRtsState& state, int player,
                              const MicroRtsConfig& config);

std::vector<std::uint8_t> MicroRtsLegalActions(const MicroRtsState& state, int player);

class MicroRtsEnv : public GameEnv {
 public:
  explicit MicroRtsEnv(MicroRtsConfig config = {});

  GameKind kind() const override { return GameKind::kMicroRts; }
  std::string name() const override { return "microrts"; }
  int num_actions() const override { return rts::kNumCommands; }
  ObservationShape observation_shape() const override {
    return {rts::kNumChannels, config_.map_size, config_.map_size};
  }
  std::array<Observation, kNumPlayers> Reset(std::uint64_t seed) override;
  Observation Observe(int player) const override;
  bool IsActive(int player) const override;
  bool IsTerminal() const override { return state_.terminal; }
  int tick() const override { return state_.tick; }
  std::unique_ptr<GameEnv> Clone() const override;

  const MicroRtsConfig& config() const { return config_; }
  const MicroRtsState& state() const { return state_; }
  // Scenario construction in tests; the caller keeps the state consistent.
  MicroRtsState& mutable_state() { return state_; }

  // Adds a unit owned by `owner` at (x, y) with full health.
  int SpawnUnit(int owner, rts::UnitType type, int x, int y);

  // Advances one engine tick with the current stances and queues.
  void Tick();

 protected:
  StepResult DoStep(const JointAction& actions) override;
  std::vector<std::uint8_t> DoLegalActions(int player) const override;

 private:
  void ApplyCommand(int player, int command);
  void Produce(int player);
  void Combat();
  void Move();
  void CheckTerminal();

  MicroRtsConfig config_;
  MicroRtsState state_;
};

}  // namespace nfsp::envs

#endif  // NFSP_ENVS_MICRO_RTS_H_
