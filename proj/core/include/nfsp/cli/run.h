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

#ifndef NFSP_CLI_RUN_H_
#define NFSP_CLI_RUN_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "nfsp/cli/config.h"
#include "nfsp/train/policy.h"

namespace nfsp::cli {

inline constexpr const char* kOutRootEnv = "NFSP_OUT_ROOT";

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

// Run directory layout:
//   config.txt                  resolved config with provenance
//   metrics.csv                 one row per update, probe columns filled at probe points
//   checkpoints/update_<n>/     bundle<b>.ckpt, memory<b>_<m>.rrb, state.txt
//   checkpoints/LATEST          name of the newest checkpoint directory
//   final/bundle<b>.ckpt        final networks
//   report.json                 evaluation report
std::filesystem::path ResolveRunDir(const RunConfig& config);

// Runs config.command. Errors propagate as exceptions (ConfigError for
// configuration problems); RunMain maps them to exit statuses.
void Dispatch(const RunConfig& config, std::ostream& out);

// Parses the arguments that follow the subcommand and dispatches, printing
// errors to `err`. Returns the exit status.
int RunMain(const std::string& command, const std::string& config_file,
            const std::vector<std::string>& flags, std::ostream& out, std::ostream& err);

// Resolves an opponent or target: random | simple | hit_and_run | uniform |
// checkpoint path (read through `head`).
std::shared_ptr<const train::Policy> LoadPolicy(const std::string& spec, nn::Head head);

// Metrics CSV header (after the "# nfsp-metrics" line).
extern const char* const kMetricsColumns;

// Reads metrics.csv and writes rows (games_experienced, winrate_vs_a,
// winrate_vs_b, exploitability) at log-spaced episode counts from `start` to
// the last recorded count. Missing values are written as NA. Throws
// MissingDataError when the metrics hold no probe rows.
void EmitLearningCurve(const std::filesystem::path& metrics, const std::filesystem::path& curve,
                       std::int64_t start, int per_decade);

}  // namespace nfsp::cli

#endif  // NFSP_CLI_RUN_H_
