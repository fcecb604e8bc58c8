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
#include <memory>
#include <vector>

#include "doctest.h"
#include "nfsp/envs/kuhn.h"
#include "nfsp/envs/registry.h"
#include "nfsp/eval/best_response.h"
#include "nfsp/eval/winrate.h"
#include "nfsp/train/nfsp.h"
#include "nfsp/train/policy.h"
#include "nfsp/train/transfer.h"
#include "scenarios.h"
#include "test_util.h"

namespace nfsp::train {
namespace {

TrainConfig KuhnConfig(std::uint64_t seed, bool shared = true) {
  TrainConfig c;
  c.game.name = "kuhn";
  c.arch = nn::ArchSpec::Mlp(envs::kuhn::kFeatureSize, 1, 16, envs::kuhn::kNumActions);
  c.hp.batch_size = 8;
  c.hp.batch_time = 4;
  c.hp.games_per_process = 8;
  c.hp.reservoir_capacity = 256;
  c.hp.sl_sample = 32;
  c.shared = shared;
  c.seed = seed;
  c.max_updates = 5;
  return c;
}

envs::Observation MaskedObservation(int features, std::vector<std::uint8_t> legal) {
  envs::Observation o;
  o.features.assign(static_cast<std::size_t>(features), 0.5);
  o.legal = std::move(legal);
  return o;
}

bool SameParams(const nn::Network& a, const nn::Network& b) {
  return a.num_params() == b.num_params() &&
         std::equal(a.params().begin(), a.params().end(), b.params().begin());
}

TEST_SUITE("nfsp") {
  TEST_CASE("rl actor follows a deterministic policy") {
    nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(4, 1, 8, 9), 1);
    net.ZeroHead(nn::Head::kPolicyRl);
    const nn::ParamRange head = net.range(nn::Part::kPolicyRlHead);
    net.mutable_params()[head.offset + head.size - 9 + 3] = 80.0;  // bias of action 3
    const auto obs = MaskedObservation(4, std::vector<std::uint8_t>(9, 1));
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) CHECK(RlActor(net, obs, rng) == 3);
  }

  TEST_CASE("rl actor renormalizes over the legal mask") {
    nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(4, 1, 8, 9), 1);
    net.ZeroHead(nn::Head::kPolicyRl);
    std::vector<std::uint8_t> legal(9, 0);
    legal[1] = legal[4] = legal[8] = 1;
    const auto obs = MaskedObservation(4, legal);
    Rng rng(6);
    const int n = 100000;
    std::vector<int> counts(9, 0);
    for (int i = 0; i < n; ++i) ++counts[RlActor(net, obs, rng)];
    const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
    for (int a = 0; a < 9; ++a) {
      if (legal[a]) {
        CHECK(std::abs(counts[a] - n / 3.0) <= 3 * sigma);
      } else {
        CHECK(counts[a] == 0);
      }
    }
  }

  TEST_CASE("actors are deterministic under a fixed seed") {
    const nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(4, 2, 8, 5), 3);
    const auto obs = MaskedObservation(4, std::vector<std::uint8_t>(5, 1));
    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i) {
      CHECK(RlActor(net, obs, a) == RlActor(net, obs, b));
      CHECK(SlActor(net, obs, a) == SlActor(net, obs, b));
    }
  }

  TEST_CASE("sampling falls back to uniform when the policy misses the legal set") {
    std::vector<std::uint8_t> legal{0, 1, 1, 0};
    const auto obs = MaskedObservation(2, legal);
    const std::vector<double> probs{0.5, 0.0, 0.0, 0.5};
    Rng rng(1);
    int ones = 0;
    for (int i = 0; i < 2000; ++i) {
      const int a = SampleMasked(probs, obs, rng);
      REQUIRE((a == 1 || a == 2));
      ones += a == 1;
    }
    CHECK(std::abs(ones - 1000) <= 3 * std::sqrt(500.0));
  }

  TEST_CASE("fresh SL head plays uniformly over the legal actions") {
    nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(4, 1, 8, 3), 1);
    net.ZeroHead(nn::Head::kPolicySl);
    const auto obs = MaskedObservation(4, {1, 1, 1});
    Rng rng(2);
    std::vector<int> counts(3, 0);
    const int n = 30000;
    for (int i = 0; i < n; ++i) ++counts[SlActor(net, obs, rng)];
    for (int c : counts) CHECK(std::abs(c - n / 3.0) <= 3 * std::sqrt(n * 2.0 / 9));
  }

  TEST_CASE("sl actor reproduces a learned target distribution") {
    nn::Network net = nn::Network::Build(nn::ArchSpec::Mlp(4, 1, 8, 3), 8);
    sl::ReservoirBuffer buf(4, 4, 3, 1);
    const auto obs = MaskedObservation(4, {1, 1, 1});
    const std::vector<double> target{0.5, 0.3, 0.2};
    buf.Insert(obs.features, obs.legal, target);
    rl::Hyperparams h;
    h.lr_sl = 0.5;
    h.sl_sample = 4;
    h.max_grad_norm = 10.0;
    for (int i = 0; i < 4000; ++i) sl::SlUpdate(net, buf, h);
    Rng rng(3);
    const int n = 100000;
    std::vector<int> counts(3, 0);
    for (int i = 0; i < n; ++i) ++counts[SlActor(net, obs, rng)];
    for (int a = 0; a < 3; ++a) {
      const double sigma = std::sqrt(n * target[a] * (1 - target[a]));
      CHECK(std::abs(counts[a] - n * target[a]) <= 3 * sigma);
    }
  }

  TEST_CASE("log probe schedule") {
    const auto s = LogProbeSchedule(1000, 100000, 2);
    CHECK(s == std::vector<std::int64_t>{1000, 3162, 10000, 31623, 100000});
    CHECK(LogProbeSchedule(1000, 500, 4).empty());
    CHECK(LogProbeSchedule(1000, 1500, 4).back() == 1500);
  }

  TEST_CASE("batches have lanes x steps rows with stored policies from the live network") {
    TrainConfig c = KuhnConfig(3);
    NfspRunner runner(c);
    int seen = 0;
    runner.batch_observer = [&](int, const rl::TrajectoryBatch& b) {
      CHECK(b.lanes == c.hp.batch_size);
      CHECK(b.steps == c.hp.batch_time);
      CHECK(b.states.rows() == b.lanes * b.steps);
      if (runner.updates() == 0) {
        const nn::Outputs out =
            runner.bundles()[0].net.Forward({b.states, b.legal}, nn::Head::kPolicyRl);
        CHECK(out.policy_rl == b.old_policy);
      }
      ++seen;
    };
    runner.Round();
    CHECK(seen == kNumProcesses);
  }

  TEST_CASE("windows continue into the next episode after a terminal") {
    // In Kuhn a non-terminal learner decision can only be the opening check
    // of player 0, whose next decision faces check-bet.
    TrainConfig c = KuhnConfig(4);
    c.hp.batch_time = 6;
    NfspRunner runner(c);
    int continuations = 0;
    runner.batch_observer = [&](int, const rl::TrajectoryBatch& b) {
      for (int l = 0; l < b.lanes; ++l) {
        for (int t = 0; t + 1 < b.steps; ++t) {
          const int row = l * b.steps + t;
          if (b.terminal[row]) continue;
          CHECK(b.states(row, 5) == 1.0);      // empty history
          CHECK(b.states(row + 1, 8) == 1.0);  // history "cb"
          ++continuations;
        }
      }
    };
    for (int i = 0; i < 3; ++i) runner.Round();
    CHECK(continuations > 0);
  }

  TEST_CASE("only RL-actor experience reaches the reservoir") {
    for (bool shared : {true, false}) {
      TrainConfig c = KuhnConfig(5, shared);
      NfspRunner runner(c);
      std::int64_t rows = 0;
      runner.batch_observer = [&](int, const rl::TrajectoryBatch& b) { rows += b.size(); };
      for (int i = 0; i < 4; ++i) runner.Round();
      CHECK(runner.impure_offers() == 0);
      std::int64_t offered = 0;
      for (const auto& bundle : runner.bundles()) {
        for (const auto& m : bundle.memories) offered += m.offered();
      }
      CHECK(offered == rows);
    }
  }

  TEST_CASE("runs are bit-reproducible under a fixed seed") {
    for (bool shared : {true, false}) {
      const auto a = RunNfsp(KuhnConfig(6, shared));
      const auto b = RunNfsp(KuhnConfig(6, shared));
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(SameParams(a[i].net, b[i].net));
      const auto c = RunNfsp(KuhnConfig(7, shared));
      CHECK_FALSE(SameParams(a[0].net, c[0].net));
    }
  }

  TEST_CASE("shared processes are exchangeable under a seed swap") {
    TrainConfig c = KuhnConfig(8);
    c.process_seeds = std::array<std::uint64_t, 2>{101, 202};
    TrainConfig swapped = c;
    swapped.process_seeds = std::array<std::uint64_t, 2>{202, 101};
    NfspRunner a(c), b(swapped);
    for (int i = 0; i < 6; ++i) {
      const auto ra = a.Round();
      const auto rb = b.Round();
      for (int p = 0; p < 2; ++p) {
        CHECK(ra[p].ppo.policy_loss == rb[1 - p].ppo.policy_loss);
        CHECK(ra[p].ppo.value_loss == rb[1 - p].ppo.value_loss);
        CHECK(ra[p].sl.loss == rb[1 - p].sl.loss);
        CHECK(ra[p].buffer_size == rb[1 - p].buffer_size);
      }
    }
    CHECK(SameParams(a.bundles()[0].net, b.bundles()[0].net));
  }

  TEST_CASE("self-play mode skips the SL machinery") {
    TrainConfig c = KuhnConfig(9);
    c.mode = Mode::kSelfPlay;
    NfspRunner runner(c);
    const nn::Network before = runner.bundles()[0].net;
    std::vector<UpdateRecord> all;
    RunHooks hooks;
    hooks.on_update = [&](const UpdateRecord& r) { all.push_back(r); };
    runner.Run(hooks);
    REQUIRE(all.size() == 10);
    for (const auto& r : all) {
      CHECK_FALSE(r.sl_enabled);
      CHECK(r.buffer_offered == 0);
    }
    const auto x = before.part_params(nn::Part::kPolicySlHead);
    const auto y = runner.bundles()[0].net.part_params(nn::Part::kPolicySlHead);
    CHECK(std::equal(x.begin(), x.end(), y.begin()));
    CHECK(runner.bundles()[0].sl_updates == 0);
  }

  TEST_CASE("with SL towers equal to RL towers a round matches self-play") {
    for (bool shared : {true, false}) {
      TrainConfig c = KuhnConfig(10, shared);
      TrainConfig sp = c;
      sp.mode = Mode::kSelfPlay;
      auto bundles = MakeBundles(c);
      for (auto& b : bundles) {
        b.net.CopyPart(nn::Part::kRlBody, nn::Part::kSlBody);
        b.net.CopyPart(nn::Part::kPolicyRlHead, nn::Part::kPolicySlHead);
      }
      NfspRunner nfsp(c, bundles);
      NfspRunner self(sp, bundles);
      const auto rn = nfsp.Round();
      const auto rs = self.Round();
      for (int p = 0; p < 2; ++p) CHECK(rn[p].ppo.total_loss == rs[p].ppo.total_loss);
      for (std::size_t b = 0; b < bundles.size(); ++b) {
        for (nn::Part part : {nn::Part::kRlBody, nn::Part::kPolicyRlHead, nn::Part::kValueRlHead}) {
          const auto x = nfsp.bundles()[b].net.part_params(part);
          const auto y = self.bundles()[b].net.part_params(part);
          CHECK(std::equal(x.begin(), x.end(), y.begin()));
        }
      }
    }
  }

  TEST_CASE("episode budgets stop the run") {
    TrainConfig c = KuhnConfig(11);
    c.max_updates = 0;
    c.max_episodes = 300;
    NfspRunner runner(c);
    runner.Run();
    CHECK(runner.episodes() >= 300);
    CHECK(runner.updates() > 0);
  }

  TEST_CASE("transfer copies the RL tower into the SL tower") {
    const nn::ArchSpec arch = nn::ArchSpec::Mlp(9, 2, 12, 3);
    const nn::Network src = nn::Network::Build(arch, 4);
    const nn::Network dst = PretrainTransfer(src, arch, {true, true, 77});
    envs::KuhnEnv env;
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
      const auto obs = env.Reset(rng());
      const envs::Observation* o = &obs[0];
      const nn::Outputs out = dst.Forward(MakeInputs(std::span(&o, 1), arch), nn::HeadSet::All());
      const nn::Outputs ref = src.Forward(MakeInputs(std::span(&o, 1), arch), nn::HeadSet::All());
      CHECK(out.policy_sl == out.policy_rl);
      CHECK(out.policy_rl == ref.policy_rl);
      CHECK(out.value == ref.value);
    }
  }

  TEST_CASE("RL-only transfer leaves the SL tower fresh") {
    const nn::ArchSpec arch = nn::ArchSpec::Mlp(9, 2, 12, 3);
    const nn::Network src = nn::Network::Build(arch, 4);
    const nn::Network dst = PretrainTransfer(src, arch, {false, false, 77});
    const nn::Network fresh = nn::Network::Build(arch, 77);
    const auto a = dst.part_params(nn::Part::kPolicySlHead);
    const auto b = fresh.part_params(nn::Part::kPolicySlHead);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
    const auto v = dst.part_params(nn::Part::kValueRlHead);
    const auto w = fresh.part_params(nn::Part::kValueRlHead);
    CHECK(std::equal(v.begin(), v.end(), w.begin()));
    CHECK_THROWS_AS(PretrainTransfer(src, nn::ArchSpec::Mlp(9, 2, 16, 3), {}),
                    std::invalid_argument);
  }

  TEST_CASE("SL tower tracks the average of a scripted RL schedule") {
    const auto r = testing::RunAveraging(1, 8, 512, 16);
    CHECK(r.final_l1 <= 0.05);
  }

  TEST_CASE("symmetric self-play agent is even against itself") {
    TrainConfig c = KuhnConfig(12);
    c.mode = Mode::kSelfPlay;
    c.max_updates = 20;
    auto bundles = RunSelfPlay(c);
    auto net = std::make_shared<const nn::Network>(bundles[0].net);
    NetworkPolicy a(net, nn::Head::kPolicyRl, "a");
    NetworkPolicy b(net, nn::Head::kPolicyRl, "b");
    const eval::EvalReport r = eval::EvaluateWinrate(a, b, c.game, 2000, 3);
    CHECK(r.rate >= r.ci_low);
    CHECK(std::abs(r.rate - 0.5) <= 3 * std::sqrt(0.25 / 2000) + 1e-12);
  }
}

}  // namespace
}  // namespace nfsp::train
