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

#include <benchmark/benchmark.h>

#include <vector>

#include "nfsp/common/random.h"
#include "nfsp/envs/kuhn.h"
#include "nfsp/envs/micro_rts.h"
#include "nfsp/eval/best_response.h"
#include "nfsp/nn/network.h"
#include "nfsp/sl/reservoir.h"

namespace nfsp {
namespace {

nn::ArchSpec BenchArch(bool conv) {
  envs::MicroRtsEnv env;
  const auto shape = env.observation_shape();
  return conv ? nn::ArchSpec::Conv(shape.channels, shape.height, shape.width, 2, 16,
                                   env.num_actions())
              : nn::ArchSpec::Mlp(shape.size(), 2, 64, env.num_actions());
}

nn::Inputs RandomInputs(const nn::ArchSpec& arch, int batch, Rng& rng) {
  nn::Inputs in;
  in.features = nn::Matrix(batch, arch.InputSize());
  for (Eigen::Index i = 0; i < in.features.size(); ++i) in.features.data()[i] = UniformUnit(rng);
  in.legal = nn::Matrix::Ones(batch, arch.num_actions);
  return in;
}

void BM_Forward(benchmark::State& state) {
  const nn::ArchSpec arch = BenchArch(state.range(0) != 0);
  const nn::Network net = nn::Network::Build(arch, 1);
  Rng rng(2);
  const nn::Inputs in = RandomInputs(arch, static_cast<int>(state.range(1)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.Forward(in, nn::HeadSet::All()));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_Forward)->ArgsProduct({{0, 1}, {1, 128}});

void BM_ForwardBackward(benchmark::State& state) {
  const nn::ArchSpec arch = BenchArch(state.range(0) != 0);
  const nn::Network net = nn::Network::Build(arch, 1);
  Rng rng(3);
  const int batch = static_cast<int>(state.range(1));
  const nn::Inputs in = RandomInputs(arch, batch, rng);
  nn::LossGraph loss;
  loss.d_policy_rl = nn::Matrix::Constant(batch, arch.num_actions, 1.0 / batch);
  loss.d_policy_sl = loss.d_policy_rl;
  loss.d_value = nn::Vector::Constant(batch, 1.0 / batch);
  for (auto _ : state) {
    const nn::ForwardTrace trace = net.Trace(in, nn::HeadSet::All());
    benchmark::DoNotOptimize(net.Backward(trace, loss));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ForwardBackward)->ArgsProduct({{0, 1}, {128}});

void BM_MicroRtsStep(benchmark::State& state) {
  envs::MicroRtsEnv env;
  Rng rng(4);
  std::uint64_t episode = 0;
  auto obs = env.Reset(episode++);
  for (auto _ : state) {
    envs::JointAction joint{};
    for (int p = 0; p < envs::kNumPlayers; ++p) {
      std::vector<int> legal;
      for (int a = 0; a < env.num_actions(); ++a) {
        if (obs[p].legal[a]) legal.push_back(a);
      }
      joint[p] = legal.empty() ? envs::kNoAction
                               : legal[UniformIndex(rng, legal.size())];
    }
    const envs::StepResult r = env.Step(joint);
    obs = r.terminal ? env.Reset(episode++) : r.observations;
  }
}
BENCHMARK(BM_MicroRtsStep);

void BM_ReservoirInsert(benchmark::State& state) {
  const int features = static_cast<int>(state.range(0));
  sl::ReservoirBuffer buffer(1 << 14, features, 9, 5);
  std::vector<double> s(features, 0.5);
  const std::vector<std::uint8_t> legal(9, 1);
  const std::vector<double> pi(9, 1.0 / 9);
  for (auto _ : state) benchmark::DoNotOptimize(buffer.Insert(s, legal, pi));
}
BENCHMARK(BM_ReservoirInsert)->Arg(9)->Arg(2200);

void BM_KuhnNashConv(benchmark::State& state) {
  envs::KuhnEnv kuhn;
  const eval::UniformProfile uniform(kuhn.num_actions());
  for (auto _ : state) benchmark::DoNotOptimize(eval::NashConv(kuhn, uniform));
}
BENCHMARK(BM_KuhnNashConv);

}  // namespace
}  // namespace nfsp

BENCHMARK_MAIN();
