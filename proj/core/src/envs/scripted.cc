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

#include "nfsp/envs/scripted.h"

#include <stdexcept>

#include "nfsp/envs/micro_rts.h"

namespace nfsp::envs {
namespace {

constexpr int kSimpleArmy = 5;
constexpr int kHarassArmy = 3;
constexpr int kEconomyWorkers = 2;

int PlaneSum(const Observation& obs, int channel, int plane) {
  double s = 0.0;
  for (int i = 0; i < plane; ++i) s += obs.features[static_cast<std::size_t>(channel * plane + i)];
  return static_cast<int>(s + 0.5);
}

// Economy first: workers, then the barrack. Returns kNoAction when the
// economy is in place or nothing can be afforded yet.
int EconomyStep(const Observation& obs, const RtsView& view) {
  if (view.workers < kEconomyWorkers && obs.IsLegal(rts::kBuildWorker)) {
    return rts::kBuildWorker;
  }
  if (view.barracks == 0 && obs.IsLegal(rts::kBuildBarrack)) return rts::kBuildBarrack;
  return kNoAction;
}

int Simple(const Observation& obs) {
  const RtsView view = ReadRtsView(obs);
  if (const int a = EconomyStep(obs, view); a != kNoAction) return a;
  if (view.attackers() < kSimpleArmy) {
    return obs.IsLegal(rts::kBuildMelee) ? rts::kBuildMelee : rts::kIdle;
  }
  return rts::kAttack;
}

int HitAndRun(const Observation& obs) {
  const RtsView view = ReadRtsView(obs);
  if (const int a = EconomyStep(obs, view); a != kNoAction) return a;
  if (view.attackers() < kHarassArmy) {
    return obs.IsLegal(rts::kBuildRange) ? rts::kBuildRange : rts::kIdle;
  }
  return view.offensive ? rts::kAttackInRange : rts::kHitAndRun;
}

}  // namespace

ScriptKind ParseScriptKind(const std::string& name) {
  if (name == "simple") return ScriptKind::kSimple;
  if (name == "hit_and_run") return ScriptKind::kHitAndRun;
  if (name == "random") return ScriptKind::kRandom;
  throw std::invalid_argument("unknown scripted policy '" + name +
                              "' (expected simple, hit_and_run or random)");
}

std::string ScriptName(ScriptKind kind) {
  switch (kind) {
    case ScriptKind::kSimple: return "simple";
    case ScriptKind::kHitAndRun: return "hit_and_run";
    case ScriptKind::kRandom: return "random";
  }
  return "?";
}

RtsView ReadRtsView(const Observation& obs) {
  if (obs.game != GameKind::kMicroRts) {
    throw std::invalid_argument("scripted policies need a MicroRTS-lite observation");
  }
  const int plane = static_cast<int>(obs.features.size()) / rts::kNumChannels;
  if (plane <= 0 || plane * rts::kNumChannels != static_cast<int>(obs.features.size())) {
    throw std::invalid_argument("malformed MicroRTS-lite observation");
  }
  RtsView v;
  v.workers = PlaneSum(obs, rts::kOwnWorker, plane);
  v.barracks = PlaneSum(obs, rts::kOwnBarrack, plane);
  v.melee = PlaneSum(obs, rts::kOwnMelee, plane);
  v.range = PlaneSum(obs, rts::kOwnRange, plane);
  v.offensive = obs.features[static_cast<std::size_t>(rts::kOffensive * plane)] > 0.5;
  return v;
}

int UniformLegalAction(const Observation& obs, Rng& rng) {
  const int n = obs.NumLegal();
  if (n == 0) return kNoAction;
  int pick = static_cast<int>(UniformIndex(rng, static_cast<std::uint64_t>(n)));
  for (int a = 0; a < static_cast<int>(obs.legal.size()); ++a) {
    if (obs.legal[a] && pick-- == 0) return a;
  }
  return kNoAction;
}

int ScriptedAction(ScriptKind kind, const Observation& obs, Rng& rng) {
  ReadRtsView(obs);  // validates the observation
  switch (kind) {
    case ScriptKind::kSimple: return Simple(obs);
    case ScriptKind::kHitAndRun: return HitAndRun(obs);
    case ScriptKind::kRandom: return UniformLegalAction(obs, rng);
  }
  return rts::kIdle;
}

}  // namespace nfsp::envs
