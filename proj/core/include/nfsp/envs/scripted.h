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

#ifndef NFSP_ENVS_SCRIPTED_H_
#define NFSP_ENVS_SCRIPTED_H_

#include <string>

#include "nfsp/common/random.h"
#include "nfsp/envs/game.h"

namespace nfsp::envs {

// Rule-based MicroRTS-lite opponents.
//   kSimple: keeps one or two workers, builds a barrack, trains five melee
//            units and then attacks with everything it has.
//   kHitAndRun: trains a few range units and alternates hit-and-run with
//            attack-in-range harassment.
//   kRandom: uniform over the legal commands.
enum class ScriptKind { kSimple, kHitAndRun, kRandom };

ScriptKind ParseScriptKind(const std::string& name);
std::string ScriptName(ScriptKind kind);

// Throws std::invalid_argument for observations that do not come from
// MicroRTS-lite.
int ScriptedAction(ScriptKind kind, const Observation& obs, Rng& rng);

// Uniform over the legal entries of the mask; kNoAction when none is legal.
int UniformLegalAction(const Observation& obs, Rng& rng);

// Summary of the own-side channels of a MicroRTS-lite observation.
struct RtsView {
  int workers = 0;
  int barracks = 0;
  int melee = 0;
  int range = 0;
  bool offensive = false;
  int attackers() const { return melee + range; }
};

RtsView ReadRtsView(const Observation& obs);

}  // namespace nfsp::envs

#endif  // NFSP_ENVS_SCRIPTED_H_
