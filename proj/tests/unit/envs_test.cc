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

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nfsp/envs/kuhn.h"
#include "nfsp/envs/matrix_game.h"
#include "nfsp/envs/micro_rts.h"
#include "nfsp/envs/registry.h"
#include "nfsp/envs/replay.h"
#include "nfsp/envs/scripted.h"
#include "test_util.h"

namespace nfsp::envs {
namespace {

using rts::UnitType;

// Random legal play until terminal; returns the terminal rewards.
Rewards PlayRandom(GameEnv& env, std::uint64_t seed, int* decisions = nullptr) {
  Rng rng(seed);
  auto obs = env.Reset(seed);
  int n = 0;
  while (true) {
    JointAction joint{kNoAction, kNoAction};
    for (int p = 0; p < kNumPlayers; ++p) {
      if (env.IsActive(p)) joint[p] = UniformLegalAction(obs[p], rng);
    }
    auto step = env.Step(joint);
    ++n;
    obs = step.observations;
    if (step.terminal) {
      if (decisions) *decisions = n;
      return step.rewards;
    }
  }
}

// Empty battlefield with both bases placed; used by scenario tests.
MicroRtsEnv EmptyField() {
  MicroRtsEnv env;
  env.Reset(1);
  MicroRtsState& s = env.mutable_state();
  s.units.clear();
  s.players[0].base_x = s.players[0].base_y = 1;
  s.players[1].base_x = s.players[1].base_y = 8;
  s.players[0].resource_x = s.players[0].resource_y = 0;
  s.players[1].resource_x = s.players[1].resource_y = 9;
  env.SpawnUnit(0, UnitType::kBase, 1, 1);
  env.SpawnUnit(1, UnitType::kBase, 8, 8);
  return env;
}

double Plane(const Observation& obs, int channel, int x, int y, int n = 10) {
  return obs.features[static_cast<std::size_t>(channel * n * n + y * n + x)];
}

TEST_SUITE("envs") {
  TEST_CASE("reset is deterministic per seed") {
    for (const std::string& name : GameNames()) {
      auto a = MakeGame({name, {}});
      auto b = MakeGame({name, {}});
      const auto oa = a->Reset(42);
      const auto ob = b->Reset(42);
      for (int p = 0; p < kNumPlayers; ++p) {
        CHECK(oa[p].features == ob[p].features);
        CHECK(oa[p].legal == ob[p].legal);
      }
    }
  }

  TEST_CASE("registry rejects unknown games") {
    CHECK_THROWS(MakeGame({"chess", {}}));
    CHECK(IsEnumerable("kuhn"));
    CHECK(IsEnumerable("biased_pennies"));
    CHECK_FALSE(IsEnumerable("microrts"));
  }

  TEST_CASE("kuhn deals are uniform over the six permutations") {
    KuhnEnv env;
    std::map<std::pair<int, int>, std::int64_t> counts;
    for (std::uint64_t s = 0; s < 60000; ++s) {
      env.Reset(s);
      const int c0 = env.state().card(0);
      const int c1 = env.state().card(1);
      REQUIRE(c0 != c1);
      ++counts[{c0, c1}];
    }
    REQUIRE(counts.size() == 6);
    std::vector<std::int64_t> v;
    for (auto& [k, c] : counts) v.push_back(c);
    // 1% critical value for 5 degrees of freedom.
    CHECK(testing::ChiSquareStatistic(v, 10000.0) < 15.086);
  }

  TEST_CASE("kuhn opening offers exactly check and bet") {
    KuhnEnv env;
    const auto obs = env.Reset(3);
    CHECK(obs[0].legal == std::vector<std::uint8_t>{0, 1, 1});
    CHECK(obs[1].NumLegal() == 0);
    auto step = env.Step({kuhn::kBet, kNoAction});
    CHECK(step.observations[1].legal == std::vector<std::uint8_t>{1, 1, 0});
    CHECK_THROWS_AS(env.Step({kNoAction, kuhn::kBet}), std::invalid_argument);
  }

  TEST_CASE("kuhn observations depend only on the acting player's information set") {
    // Walk the full tree; states sharing card+history must encode identically.
    std::map<std::string, std::vector<double>> seen;
    std::vector<std::unique_ptr<TreeState>> stack;
    stack.push_back(KuhnEnv().NewTreeRoot());
    int checked = 0;
    while (!stack.empty()) {
      auto s = std::move(stack.back());
      stack.pop_back();
      if (s->IsTerminal()) continue;
      if (!s->IsChance()) {
        for (int p = 0; p < kNumPlayers; ++p) {
          const auto key = s->InfoSetKey(p);
          const auto f = s->Observe(p).features;
          auto [it, fresh] = seen.emplace(key, f);
          if (!fresh) {
            CHECK(it->second == f);
            ++checked;
          }
        }
      }
      for (int a : s->LegalActions()) stack.push_back(s->Child(a));
    }
    CHECK(checked > 0);
  }

  TEST_CASE("kuhn payoffs follow the betting rules") {
    KuhnState s;
    s.Apply(0);
    const auto cards = kuhn::Deal(0);
    const int high = cards[0] > cards[1] ? 0 : 1;
    KuhnState cc = s;
    cc.Apply(kuhn::kCall);
    cc.Apply(kuhn::kCall);
    CHECK(cc.Returns()[high] == 1.0);
    KuhnState bf = s;
    bf.Apply(kuhn::kBet);
    bf.Apply(kuhn::kFold);
    CHECK(bf.Returns() == Rewards{1.0, -1.0});
    KuhnState cbc = s;
    cbc.Apply(kuhn::kCall);
    cbc.Apply(kuhn::kBet);
    cbc.Apply(kuhn::kCall);
    CHECK(cbc.Returns()[high] == 2.0);
  }

  TEST_CASE("terminal rewards are zero-sum under random play") {
    for (const std::string& name : GameNames()) {
      const int episodes = name == "microrts" ? 200 : 10000;
      auto env = MakeGame({name, {}});
      for (int e = 0; e < episodes; ++e) {
        const Rewards r = PlayRandom(*env, e + 1);
        CHECK(r[0] + r[1] == 0.0);
      }
    }
  }

  TEST_CASE("stepping after the end is an error") {
    MatrixGameEnv env(RockPaperScissors());
    env.Reset(1);
    auto step = env.Step({0, 1});
    CHECK(step.terminal);
    CHECK(step.rewards == Rewards{-1.0, 1.0});
    CHECK_THROWS_AS(env.Step({0, 0}), std::logic_error);
  }

  TEST_CASE("biased matching pennies payoff and equilibrium") {
    const MatrixPayoff pay = BiasedMatchingPennies();
    REQUIRE(pay.num_actions() == 2);
    // With both players at (2/5, 3/5) each pure action earns the same.
    const double q = 0.4;
    const double heads = q * pay.row_payoff[0][0] + (1 - q) * pay.row_payoff[0][1];
    const double tails = q * pay.row_payoff[1][0] + (1 - q) * pay.row_payoff[1][1];
    CHECK(heads == doctest::Approx(tails).epsilon(1e-12));
    CHECK(heads == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("microrts legal mask follows the production chain") {
    MicroRtsEnv env = EmptyField();
    env.mutable_state().players[0].resources = 10;
    auto mask = env.LegalActions(0);
    CHECK(mask[rts::kBuildWorker] == 1);
    CHECK(mask[rts::kBuildBarrack] == 0);  // no worker
    CHECK(mask[rts::kBuildMelee] == 0);
    CHECK(mask[rts::kBuildRange] == 0);
    for (int c = rts::kAttack; c <= rts::kIdle; ++c) CHECK(mask[c] == 1);
    env.SpawnUnit(0, UnitType::kWorker, 0, 0);
    CHECK(env.LegalActions(0)[rts::kBuildBarrack] == 1);
    env.SpawnUnit(0, UnitType::kBarrack, 2, 2);
    mask = env.LegalActions(0);
    CHECK(mask[rts::kBuildMelee] == 1);
    CHECK(mask[rts::kBuildRange] == 1);
    env.mutable_state().players[0].resources = 0;
    mask = env.LegalActions(0);
    CHECK(mask[rts::kBuildMelee] == 0);
    CHECK(mask[rts::kIdle] == 1);
  }

  TEST_CASE("microrts idle play draws at the tick limit") {
    MicroRtsConfig cfg;
    cfg.start_melee_prob = 0.0;
    MicroRtsEnv env(cfg);
    env.Reset(5);
    StepResult step;
    int decisions = 0;
    do {
      step = env.Step({rts::kIdle, rts::kIdle});
      ++decisions;
    } while (!step.terminal);
    CHECK(step.rewards == Rewards{0.0, 0.0});
    CHECK(env.tick() == cfg.tick_limit);
    CHECK(decisions == cfg.tick_limit / cfg.frame_skip);
  }

  TEST_CASE("microrts decision spans frame skip ticks") {
    MicroRtsEnv env;
    env.Reset(9);
    env.Step({rts::kIdle, rts::kIdle});
    CHECK(env.tick() == 50);
  }

  TEST_CASE("microrts episodes end within the tick limit") {
    MicroRtsEnv env;
    for (int e = 0; e < 100; ++e) {
      PlayRandom(env, 1000 + e);
      CHECK(env.tick() <= env.config().tick_limit);
    }
  }

  TEST_CASE("microrts spawn hides the opposing base") {
    MicroRtsEnv env;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto obs = env.Reset(s);
      for (int p = 0; p < kNumPlayers; ++p) {
        double enemy = 0.0;
        for (int c = rts::kEnemyBase; c <= rts::kEnemyRange; ++c) {
          for (int i = 0; i < 100; ++i) enemy += obs[p].features[c * 100 + i];
        }
        CHECK(enemy == 0.0);
      }
    }
  }

  TEST_CASE("own unit appears at its cell") {
    MicroRtsEnv env = EmptyField();
    env.SpawnUnit(0, UnitType::kWorker, 3, 4);
    const Observation obs = env.Observe(0);
    CHECK(Plane(obs, rts::kOwnWorker, 3, 4) == 1.0);
    CHECK(Plane(env.Observe(1), rts::kEnemyWorker, 3, 4) == 0.0);
  }

  TEST_CASE("fogged enemy changes leave the encoding unchanged") {
    MicroRtsEnv env = EmptyField();
    const int id = env.SpawnUnit(1, UnitType::kMelee, 7, 7);
    const Observation before = env.Observe(0);
    for (Unit& u : env.mutable_state().units) {
      if (u.id == id) {
        u.hp = 1;
        u.x = 6;
        u.type = UnitType::kRange;
      }
    }
    env.SpawnUnit(1, UnitType::kWorker, 9, 5);
    CHECK(env.Observe(0).features == before.features);
  }

  TEST_CASE("enemy entering vision becomes visible") {
    MicroRtsEnv env = EmptyField();
    env.SpawnUnit(0, UnitType::kMelee, 4, 4);
    const int id = env.SpawnUnit(1, UnitType::kMelee, 8, 4);
    CHECK(Plane(env.Observe(0), rts::kEnemyMelee, 8, 4) == 0.0);
    for (Unit& u : env.mutable_state().units) {
      if (u.id == id) u.x = 6;
    }
    CHECK(Plane(env.Observe(0), rts::kEnemyMelee, 6, 4) == 1.0);
  }

  TEST_CASE("simple script builds an army then attacks") {
    MicroRtsEnv env = EmptyField();
    env.mutable_state().players[0].resources = 10;
    env.SpawnUnit(0, UnitType::kWorker, 0, 0);
    env.SpawnUnit(0, UnitType::kWorker, 0, 1);
    env.SpawnUnit(0, UnitType::kBarrack, 2, 2);
    Rng rng(1);
    const int a = ScriptedAction(ScriptKind::kSimple, env.Observe(0), rng);
    CHECK((a == rts::kBuildMelee || a == rts::kBuildRange));
    for (int i = 0; i < 5; ++i) env.SpawnUnit(0, UnitType::kMelee, 2, 1);
    CHECK(ScriptedAction(ScriptKind::kSimple, env.Observe(0), rng) == rts::kAttack);
  }

  TEST_CASE("hit-and-run script alternates harassment commands") {
    MicroRtsEnv env = EmptyField();
    env.SpawnUnit(0, UnitType::kWorker, 0, 0);
    env.SpawnUnit(0, UnitType::kWorker, 0, 1);
    env.SpawnUnit(0, UnitType::kBarrack, 2, 2);
    for (int i = 0; i < 3; ++i) env.SpawnUnit(0, UnitType::kRange, 2, 1);
    Rng rng(1);
    const int first = ScriptedAction(ScriptKind::kHitAndRun, env.Observe(0), rng);
    CHECK(first == rts::kHitAndRun);
    env.mutable_state().players[0].stance = rts::Stance::kHitAndRun;
    CHECK(ScriptedAction(ScriptKind::kHitAndRun, env.Observe(0), rng) == rts::kAttackInRange);
  }

  TEST_CASE("scripts reject observations from other games") {
    KuhnEnv env;
    const auto obs = env.Reset(1);
    Rng rng(1);
    CHECK_THROWS_AS(ScriptedAction(ScriptKind::kSimple, obs[0], rng), std::invalid_argument);
    CHECK_THROWS(ParseScriptKind("clever"));
    CHECK(ParseScriptKind("hit_and_run") == ScriptKind::kHitAndRun);
  }

  TEST_CASE("random script is uniform over the legal set") {
    MicroRtsEnv env = EmptyField();
    const Observation obs = env.Observe(0);
    std::vector<int> legal;
    for (int a = 0; a < rts::kNumCommands; ++a) {
      if (obs.IsLegal(a)) legal.push_back(a);
    }
    REQUIRE(legal.size() >= 2);
    std::vector<std::int64_t> counts(rts::kNumCommands, 0);
    Rng rng(123);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[ScriptedAction(ScriptKind::kRandom, obs, rng)];
    const double p = 1.0 / legal.size();
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int a = 0; a < rts::kNumCommands; ++a) {
      if (obs.IsLegal(a)) {
        CHECK(std::abs(counts[a] - n * p) <= 3 * sigma);
      } else {
        CHECK(counts[a] == 0);
      }
    }
  }

  TEST_CASE("replays verify and detect tampering") {
    MicroRtsEnv env;
    Rng r0(1), r1(2);
    const ReplayLog log = RecordEpisode(
        env, 77, [&](const Observation& o) { return ScriptedAction(ScriptKind::kSimple, o, r0); },
        [&](const Observation& o) { return ScriptedAction(ScriptKind::kRandom, o, r1); });
    REQUIRE_FALSE(log.records.empty());
    std::stringstream buf;
    WriteReplay(buf, log);
    const ReplayLog back = ReadReplay(buf);
    CHECK(back.records == log.records);
    CHECK(back.seed == 77);
    std::string why;
    CHECK(VerifyReplay(env, back, &why));
    ReplayLog bad = back;
    bad.records[bad.records.size() / 2].obs_hash ^= 1;
    CHECK_FALSE(VerifyReplay(env, bad, &why));
    CHECK_FALSE(why.empty());
  }
}

}  // namespace
}  // namespace nfsp::envs
