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

#include "nfsp/eval/winrate.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace nfsp::eval {

Interval WilsonInterval(double successes, std::int64_t n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = successes / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

EvalReport EvaluateWinrate(const train::Policy& agent, const train::Policy& opponent,
                           const envs::GameSpec& game, std::int64_t n_games, std::uint64_t seed) {
  if (n_games < 1) throw std::invalid_argument("evaluate: need at least one game");
  EvalReport report;
  report.opponent = opponent.name();
  report.seed = seed;
  std::unique_ptr<envs::GameEnv> env = envs::MakeGame(game);
  for (std::int64_t g = 0; g < n_games; ++g) {
    const auto pair = static_cast<std::uint64_t>(g / 2);
    const int agent_seat = static_cast<int>(g % 2);
    std::array<Rng, envs::kNumPlayers> rngs = {Rng(DeriveSeed(seed, 4 * pair + 1)),
                                               Rng(DeriveSeed(seed, 4 * pair + 2))};
    try {
      auto obs = env->Reset(DeriveSeed(seed, 4 * pair));
      envs::StepResult r;
      while (!env->IsTerminal()) {
        envs::JointAction joint{envs::kNoAction, envs::kNoAction};
        for (int s = 0; s < envs::kNumPlayers; ++s) {
          if (!env->IsActive(s)) continue;
          const train::Policy& who = s == agent_seat ? agent : opponent;
          joint[s] = who.ActOne(obs[s], rngs[s]);
        }
        r = env->Step(joint);
        obs = r.observations;
      }
      const double mine = r.rewards[agent_seat];
      if (mine > 0.0) {
        ++report.wins;
      } else if (mine < 0.0) {
        ++report.losses;
      } else {
        ++report.draws;
      }
    } catch (const std::exception& e) {
      ++report.excluded;
      spdlog::warn("evaluation game {} excluded: {}", g, e.what());
    }
  }
  report.games = report.wins + report.losses + report.draws;
  if (report.games > 0) {
    const double score = static_cast<double>(report.wins) + 0.5 * static_cast<double>(report.draws);
    report.rate = score / static_cast<double>(report.games);
    const Interval ci = WilsonInterval(score, report.games);
    report.ci_low = ci.low;
    report.ci_high = ci.high;
  }
  return report;
}

std::string ReportToJson(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["opponent"] = r.opponent;
  j["games"] = r.games;
  j["wins"] = r.wins;
  j["losses"] = r.losses;
  j["draws"] = r.draws;
  j["rate"] = r.rate;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["seed"] = r.seed;
  j["excluded"] = r.excluded;
  return j.dump(2);
}

EvalReport ReportFromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  EvalReport r;
  r.opponent = j.at("opponent").get<std::string>();
  r.games = j.at("games").get<std::int64_t>();
  r.wins = j.at("wins").get<std::int64_t>();
  r.losses = j.at("losses").get<std::int64_t>();
  r.draws = j.at("draws").get<std::int64_t>();
  r.rate = j.at("rate").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.excluded = j.at("excluded").get<std::int64_t>();
  return r;
}

void WriteReport(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  out << ReportToJson(report) << '\n';
}

}  // namespace nfsp::eval
