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

#ifndef NFSP_EVAL_WINRATE_H_
#define NFSP_EVAL_WINRATE_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "nfsp/envs/registry.h"
#include "nfsp/train/policy.h"

namespace nfsp::eval {

inline constexpr std::int64_t kHeadlineGames = 1000;

struct EvalReport {
  std::string opponent;
  std::int64_t games = 0;     // completed games; excluded games are not counted
  std::int64_t wins = 0;
  std::int64_t losses = 0;
  std::int64_t draws = 0;
  double rate = 0.0;          // (wins + draws / 2) / games
  double ci_low = 0.0;        // Wilson 95% interval on rate
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  std::int64_t excluded = 0;  // games lost to environment faults

  bool headline() const { return games >= kHeadlineGames; }
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wilson score interval for `successes` out of n (successes may be
// fractional when draws count as half a win).
Interval WilsonInterval(double successes, std::int64_t n, double z = 1.959963984540054);

// Plays n games. Games 2k and 2k+1 share an environment seed with the seats
// swapped, and each seat samples from its own seeded stream, so exchanging
// agent and opponent mirrors every pair exactly.
EvalReport EvaluateWinrate(const train::Policy& agent, const train::Policy& opponent,
                           const envs::GameSpec& game, std::int64_t n_games, std::uint64_t seed);

// Report JSON: {"version":1, "opponent", "games", "wins", "losses", "draws",
// "rate", "ci_low", "ci_high", "seed", "excluded"}.
std::string ReportToJson(const EvalReport& report);
EvalReport ReportFromJson(const std::string& text);
void WriteReport(const std::filesystem::path& path, const EvalReport& report);

}  // namespace nfsp::eval

#endif  // NFSP_EVAL_WINRATE_H_
