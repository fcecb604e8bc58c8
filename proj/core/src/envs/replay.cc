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

#include "nfsp/envs/replay.h"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nfsp::envs {
namespace {

using json = nlohmann::json;

std::string HashHex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Runs the episode with the actions chosen by `choose`, reporting each
// decision to `sink` once the step rewards are known.
template <typename Choose, typename Sink>
void Drive(GameEnv& env, std::uint64_t seed, Choose choose, Sink sink) {
  auto obs = env.Reset(seed);
  while (!env.IsTerminal()) {
    JointAction joint{kNoAction, kNoAction};
    std::vector<ReplayRecord> pending;
    for (int p = 0; p < kNumPlayers; ++p) {
      if (!env.IsActive(p)) continue;
      joint[p] = choose(p, obs[p]);
      pending.push_back({env.tick(), p, HashObservation(obs[p]), joint[p], 0.0});
    }
    const StepResult r = env.Step(joint);
    for (ReplayRecord& rec : pending) {
      rec.reward = r.rewards[rec.player];
      if (!sink(rec)) return;
    }
    obs = r.observations;
  }
}

}  // namespace

void WriteReplay(std::ostream& out, const ReplayLog& log) {
  out << json{{"format", "nfsp-replay"},
              {"version", ReplayLog::kVersion},
              {"game", log.game},
              {"seed", log.seed}}
             .dump()
      << '\n';
  for (const ReplayRecord& r : log.records) {
    out << json{{"tick", r.tick},
                {"player", r.player},
                {"obs_hash", HashHex(r.obs_hash)},
                {"action", r.action},
                {"reward", r.reward}}
               .dump()
        << '\n';
  }
}

ReplayLog ReadReplay(std::istream& in) {
  ReplayLog log;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("replay: empty log");
  try {
    const json header = json::parse(line);
    if (header.at("format") != "nfsp-replay") throw std::runtime_error("replay: bad format tag");
    if (header.at("version").get<int>() != ReplayLog::kVersion) {
      throw std::runtime_error("replay: unsupported version");
    }
    log.game = header.at("game").get<std::string>();
    log.seed = header.at("seed").get<std::uint64_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      ReplayRecord r;
      r.tick = j.at("tick").get<int>();
      r.player = j.at("player").get<int>();
      r.obs_hash = std::stoull(j.at("obs_hash").get<std::string>(), nullptr, 16);
      r.action = j.at("action").get<int>();
      r.reward = j.at("reward").get<double>();
      log.records.push_back(r);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("replay: malformed line: ") + e.what());
  }
  return log;
}

ReplayLog RecordEpisode(GameEnv& env, std::uint64_t seed, const SeatPolicy& player0,
                        const SeatPolicy& player1) {
  ReplayLog log;
  log.game = env.name();
  log.seed = seed;
  Drive(
      env, seed, [&](int p, const Observation& o) { return p == 0 ? player0(o) : player1(o); },
      [&](const ReplayRecord& r) {
        log.records.push_back(r);
        return true;
      });
  return log;
}

bool VerifyReplay(GameEnv& env, const ReplayLog& log, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  if (log.game != env.name()) return fail("game mismatch: log has " + log.game);
  std::vector<ReplayRecord> again;
  std::size_t next = 0;
  try {
    Drive(
        env, log.seed,
        [&](int, const Observation&) {
          if (next >= log.records.size()) throw std::runtime_error("log ends early");
          return log.records[next++].action;
        },
        [&](const ReplayRecord& r) {
          again.push_back(r);
          return true;
        });
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  if (again.size() != log.records.size()) return fail("log has trailing records");
  for (std::size_t i = 0; i < again.size(); ++i) {
    if (!(again[i] == log.records[i])) {
      return fail("record " + std::to_string(i) + " diverges");
    }
  }
  return true;
}

}  // namespace nfsp::envs
