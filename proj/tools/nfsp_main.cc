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

// Command-line front end: nfsp <command> [--config FILE] [key=value | --key value ...]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfsp/cli/config.h"
#include "nfsp/cli/run.h"

int main(int argc, char** argv) {
  CLI::App app{"Neural fictitious self-play with a PPO best response"};
  app.require_subcommand(1);
  std::string config_file;
  std::string keys = "Config keys (key=value or --key value):\n";
  for (const auto& k : nfsp::cli::ConfigKeys()) {
    keys += "  " + k.key + " (" + k.type + "): " + k.help + "\n";
  }
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train", "train agents (mode=nfsp, selfplay or pretrain-then-nfsp)"},
      {"pretrain", "self-play pretraining followed by weight transfer"},
      {"eval", "win rate of checkpoint=<path> against opponent=<name|path>"},
      {"exploit", "train a best-response exploiter against target=<name|path>"},
      {"curve", "resample metrics=<path> onto log-spaced checkpoints"},
      {"nashconv", "exact exploitability of checkpoint=<path> on a small game"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("-c,--config", config_file, "key=value config file");
    sub->footer(keys);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? nfsp::cli::kExitOk : nfsp::cli::kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  return nfsp::cli::RunMain(sub->get_name(), config_file, sub->remaining(), std::cout, std::cerr);
}
