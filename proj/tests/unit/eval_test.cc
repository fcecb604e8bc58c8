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

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "nfsp/envs/kuhn.h"
#include "nfsp/envs/matrix_game.h"
#include "nfsp/envs/registry.h"
#include "nfsp/eval/best_response.h"
#include "nfsp/eval/exploiter.h"
#include "nfsp/eval/winrate.h"
#include "nfsp/train/policy.h"
#include "scenarios.h"

namespace nfsp::eval {
namespace {

using envs::TreeState;

// Independent oracle: enumerate every pure strategy of `player` (one action
// per information set) and evaluate it exactly against `profile`.
double BruteForceBestResponse(const envs::GameEnv& game, const StrategyProfile& profile,
                              int player) {
  std::vector<std::string> infosets;
  std::map<std::string, std::vector<int>> actions;
  std::function<void(const TreeState&)> collect = [&](const TreeState& s) {
    if (s.IsTerminal()) return;
    if (!s.IsChance() && s.CurrentPlayer() == player) {
      const std::string key = s.InfoSetKey(player);
      if (!actions.count(key)) {
        infosets.push_back(key);
        actions[key] = s.LegalActions();
      }
    }
    for (int a : s.LegalActions()) collect(*s.Child(a));
  };
  const auto root = game.NewTreeRoot();
  collect(*root);

  std::map<std::string, int> pure;
  std::function<double(const TreeState&)> value = [&](const TreeState& s) -> double {
    if (s.IsTerminal()) return s.Returns()[player];
    if (s.IsChance()) {
      double v = 0.0;
      for (auto [a, p] : s.ChanceOutcomes()) v += p * value(*s.Child(a));
      return v;
    }
    if (s.CurrentPlayer() == player) return value(*s.Child(pure[s.InfoSetKey(player)]));
    const auto pi = profile.Policy(s);
    double v = 0.0;
    for (int a : s.LegalActions()) {
      if (pi[a] > 0) v += pi[a] * value(*s.Child(a));
    }
    return v;
  };

  double best = -1e300;
  std::function<void(std::size_t)> enumerate = [&](std::size_t i) {
    if (i == infosets.size()) {
      best = std::max(best, value(*root));
      return;
    }
    for (int a : actions[infosets[i]]) {
      pure[infosets[i]] = a;
      enumerate(i + 1);
    }
  };
  enumerate(0);
  return best;
}

TabularProfile RandomProfile(const envs::GameEnv& game, std::uint64_t seed) {
  TabularProfile t = Tabulate(game, UniformProfile(game.num_actions()));
  Rng rng(seed);
  TabularProfile out;
  for (const auto& [key, dist] : t.table()) {
    std::vector<double> d(dist.size(), 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < d.size(); ++a) {
      if (dist[a] > 0) {
        d[a] = UniformUnit(rng) + 1e-3;
        total += d[a];
      }
    }
    for (double& x : d) x /= total;
    out.Set(key, d);
  }
  return out;
}

TabularProfile Pure(std::vector<double> first, std::vector<double> second) {
  TabularProfile t;
  t.Set("P0", std::move(first));
  t.Set("P1", std::move(second));
  return t;
}

TEST_SUITE("eval") {
  TEST_CASE("rock paper scissors against an always-rock opponent") {
    envs::MatrixGameEnv rps(envs::RockPaperScissors());
    const TabularProfile rock = Pure({1, 0, 0}, {1, 0, 0});
    const BestResponse br = ExactBestResponse(rps, rock, 0);
    CHECK(br.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(br.actions.at("P0") == 1);  // paper
    CHECK(NashConv(rps, rock) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("matching pennies equilibrium") {
    envs::MatrixGameEnv mp(envs::MatchingPennies());
    const TabularProfile eq = Pure({0.5, 0.5}, {0.5, 0.5});
    CHECK(std::abs(ExactBestResponse(mp, eq, 0).value) <= 1e-12);
    CHECK(NashConv(mp, eq) <= 1e-9);
    envs::MatrixGameEnv bp(envs::BiasedMatchingPennies());
    const TabularProfile beq = Pure({0.4, 0.6}, {0.4, 0.6});
    CHECK(NashConv(bp, beq) <= 1e-9);
    CHECK(ExpectedReturns(bp, beq)[0] == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("kuhn best response to uniform matches brute force") {
    envs::KuhnEnv kuhn;
    const UniformProfile uniform(3);
    for (int p = 0; p < 2; ++p) {
      const double oracle = BruteForceBestResponse(kuhn, uniform, p);
      CHECK(std::abs(ExactBestResponse(kuhn, uniform, p).value - oracle) <= 1e-12);
    }
    // Frozen reference value for the uniform profile.
    CHECK(NashConv(kuhn, uniform) == doctest::Approx(11.0 / 12).epsilon(1e-12));
  }

  TEST_CASE("kuhn equilibrium family has zero exploitability") {
    envs::KuhnEnv kuhn;
    for (double alpha : {0.0, 0.1, 0.2, 1.0 / 3}) {
      const TabularProfile eq = testing::KuhnNashProfile(alpha);
      CHECK(NashConv(kuhn, eq) <= 1e-9);
      CHECK(ExpectedReturns(kuhn, eq)[0] == doctest::Approx(-1.0 / 18).epsilon(1e-12));
    }
  }

  TEST_CASE("best response weakly improves and exploitability is nonnegative") {
    for (const std::string& name : {"kuhn", "rps", "biased_pennies"}) {
      auto game = envs::MakeGame({name, {}});
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const TabularProfile prof = RandomProfile(*game, seed);
        const envs::Rewards r = ExpectedReturns(*game, prof);
        for (int p = 0; p < 2; ++p) {
          const double br = ExactBestResponse(*game, prof, p).value;
          CHECK(br >= r[p] - 1e-12);
          if (name == "kuhn" && seed <= 3) {
            CHECK(std::abs(br - BruteForceBestResponse(*game, prof, p)) <= 1e-12);
          }
        }
        CHECK(NashConv(*game, prof) >= -1e-12);
      }
    }
  }

  TEST_CASE("tree oracle refuses games without a tree") {
    envs::MicroRtsEnv rts;
    CHECK_THROWS_AS(RequireTree(rts), std::invalid_argument);
  }

  TEST_CASE("wilson interval") {
    const Interval ci = WilsonInterval(50, 100);
    CHECK(ci.low == doctest::Approx(0.40383).epsilon(1e-4));
    CHECK(ci.high == doctest::Approx(0.59617).epsilon(1e-4));
    const Interval all = WilsonInterval(10, 10);
    CHECK(all.high == doctest::Approx(1.0));
    CHECK(all.low < 1.0);
  }

  TEST_CASE("win rate is side-symmetric under mirrored seeds") {
    const train::ScriptedPolicy simple(envs::ScriptKind::kSimple);
    const train::ScriptedPolicy random(envs::ScriptKind::kRandom);
    const envs::GameSpec game{"microrts", {}};
    const EvalReport ab = EvaluateWinrate(simple, random, game, 100, 9);
    const EvalReport ba = EvaluateWinrate(random, simple, game, 100, 9);
    CHECK(ab.wins == ba.losses);
    CHECK(ab.draws == ba.draws);
    CHECK(ab.rate + ba.rate == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("identical policies are even") {
    const train::UniformPolicy u;
    const EvalReport r = EvaluateWinrate(u, u, {"kuhn", {}}, 2000, 4);
    CHECK(r.games == 2000);
    CHECK(r.ci_low <= 0.5);
    CHECK(r.ci_high >= 0.5);
    CHECK_FALSE(EvaluateWinrate(u, u, {"kuhn", {}}, 999, 4).headline());
    CHECK(r.headline());
  }

  TEST_CASE("scripted simple beats random") {
    const train::ScriptedPolicy simple(envs::ScriptKind::kSimple);
    const train::ScriptedPolicy random(envs::ScriptKind::kRandom);
    const EvalReport r = EvaluateWinrate(simple, random, {"microrts", {}}, 300, 21);
    CHECK(r.rate > 0.8);
  }

  TEST_CASE("report json round trip and schema") {
    EvalReport r;
    r.opponent = "simple";
    r.games = 1000;
    r.wins = 600;
    r.losses = 350;
    r.draws = 50;
    r.rate = 0.625;
    r.ci_low = 0.59;
    r.ci_high = 0.65;
    r.seed = 12345;
    r.excluded = 2;
    const std::string text = ReportToJson(r);
    for (const char* key : {"opponent", "games", "wins", "losses", "draws", "rate", "ci_low",
                            "ci_high", "seed", "excluded"}) {
      CHECK(text.find(std::string("\"") + key + "\"") != std::string::npos);
    }
    const EvalReport back = ReportFromJson(text);
    CHECK(back.opponent == r.opponent);
    CHECK(back.wins == r.wins);
    CHECK(back.rate == r.rate);
    CHECK(back.excluded == r.excluded);
    CHECK_THROWS(ReportFromJson("{\"games\": 3}"));
  }

  TEST_CASE("exploiter of a uniform kuhn player approaches but never beats the oracle") {
    cli::RunConfig rc = testing::Preset(NFSP_SOURCE_DIR, "kuhn", {"episodes=0", "updates=300"});
    ExploiterConfig ec;
    ec.train = cli::MakeTrainConfig(rc);
    ec.eval_games = 200;
    const auto target = std::make_shared<const train::UniformPolicy>();
    const ExploiterResult res = TrainExploiter(target, ec);
    envs::KuhnEnv kuhn;
    auto net = std::make_shared<const nn::Network>(res.exploiter.net);
    auto mine = std::make_shared<const NetworkProfile>(net, nn::Head::kPolicyRl);
    auto theirs = std::make_shared<const UniformProfile>(3);
    const UniformProfile uniform(3);
    double achieved = 0.0, oracle = 0.0;
    for (int seat = 0; seat < 2; ++seat) {
      const SeatProfile prof(seat == 0 ? std::shared_ptr<const StrategyProfile>(mine) : theirs,
                             seat == 0 ? std::shared_ptr<const StrategyProfile>(theirs) : mine);
      achieved += ExpectedReturns(kuhn, prof)[seat] / 2;
      oracle += ExactBestResponse(kuhn, uniform, seat).value / 2;
    }
    CHECK(achieved <= oracle + 1e-12);
    CHECK(oracle - achieved <= 0.05);
    CHECK(res.report.games == 200);
  }
}

}  // namespace
}  // namespace nfsp::eval
