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

#include "nfsp/cli/run.h"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "nfsp/common/error.h"
#include "nfsp/envs/registry.h"
#include "nfsp/eval/best_response.h"
#include "nfsp/eval/exploiter.h"
#include "nfsp/eval/winrate.h"
#include "nfsp/nn/checkpoint.h"
#include "nfsp/train/nfsp.h"
#include "nfsp/train/transfer.h"

namespace nfsp::cli {

namespace fs = std::filesystem;

const char* const kMetricsColumns =
    "update,episodes,policy_loss,entropy,value_loss,total_loss,grad_norm,mean_abs_adv,"
    "mean_ratio,sl_loss,sl_skipped,buffer_size,incidents,winrate_a,winrate_b,exploitability";

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingDataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string Fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

nn::Head ResolveHead(const RunConfig& c) {
  if (c.head == "sl") return nn::Head::kPolicySl;
  if (c.head == "rl") return nn::Head::kPolicyRl;
  return c.mode == "selfplay" ? nn::Head::kPolicyRl : nn::Head::kPolicySl;
}

std::vector<std::string> ProbeOpponents(const RunConfig& c) {
  if (c.probe_opponents == "auto") {
    return c.env == "microrts" ? std::vector<std::string>{"random", "simple"}
                               : std::vector<std::string>{"uniform"};
  }
  std::vector<std::string> out;
  for (const std::string& s : Split(c.probe_opponents, ',')) {
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

struct ProbeResult {
  std::vector<double> winrates;
  std::optional<double> exploitability;
};

ProbeResult Probe(const RunConfig& c, const std::vector<train::AgentBundle>& bundles,
                  std::int64_t episodes) {
  ProbeResult r;
  const nn::Head head = ResolveHead(c);
  auto net = std::make_shared<const nn::Network>(bundles.front().net);
  const train::NetworkPolicy agent(net, head, "agent");
  const envs::GameSpec game = MakeGameSpec(c);
  for (const std::string& name : ProbeOpponents(c)) {
    const auto opp = LoadPolicy(name, head);
    r.winrates.push_back(eval::EvaluateWinrate(agent, *opp, game, c.probe_games,
                                               DeriveSeed(c.eval_seed, static_cast<std::uint64_t>(episodes)))
                             .rate);
  }
  if (envs::IsEnumerable(c.env)) {
    const auto env = envs::MakeGame(game);
    std::shared_ptr<const eval::StrategyProfile> p0 = std::make_shared<eval::NetworkProfile>(net, head);
    std::shared_ptr<const eval::StrategyProfile> p1 = p0;
    if (bundles.size() > 1) {
      p1 = std::make_shared<eval::NetworkProfile>(
          std::make_shared<const nn::Network>(bundles[1].net), head);
    }
    r.exploitability = eval::NashConv(*env, eval::SeatProfile(p0, p1));
  }
  return r;
}

std::string MetricsRow(const std::vector<train::UpdateRecord>& recs, const ProbeResult* probe) {
  const double n = static_cast<double>(recs.size());
  double pl = 0, en = 0, vl = 0, tl = 0, gn = 0, aa = 0, mr = 0, sl = 0;
  std::int64_t skipped = 0, buffer = 0;
  for (const auto& r : recs) {
    pl += r.ppo.policy_loss / n;
    en += r.ppo.entropy / n;
    vl += r.ppo.value_loss / n;
    tl += r.ppo.total_loss / n;
    gn += r.ppo.grad_norm / n;
    aa += r.ppo.mean_abs_advantage / n;
    mr += r.ppo.mean_ratio / n;
    sl += r.sl.loss / n;
    skipped += r.sl.skipped ? 1 : 0;
    buffer += r.buffer_size;
  }
  const train::UpdateRecord& first = recs.front();
  std::ostringstream row;
  row << first.update << ',' << first.episodes << ',' << Fmt(pl) << ',' << Fmt(en) << ','
      << Fmt(vl) << ',' << Fmt(tl) << ',' << Fmt(gn) << ',' << Fmt(aa) << ',' << Fmt(mr) << ',';
  if (first.sl_enabled) {
    row << Fmt(sl) << ',' << skipped << ',' << buffer;
  } else {
    row << ",,";
  }
  row << ',' << first.incidents << ',';
  if (probe != nullptr) {
    row << (probe->winrates.size() > 0 ? Fmt(probe->winrates[0]) : "") << ','
        << (probe->winrates.size() > 1 ? Fmt(probe->winrates[1]) : "") << ','
        << (probe->exploitability ? Fmt(*probe->exploitability) : "");
  } else {
    row << ",,";
  }
  return row.str();
}

std::string MetricsHeader(const RunConfig& c) {
  const auto opps = ProbeOpponents(c);
  std::string h = "# nfsp-metrics 1; a=" + (opps.size() > 0 ? opps[0] : std::string("none")) +
                  " b=" + (opps.size() > 1 ? opps[1] : std::string("none")) + "\n";
  return h + kMetricsColumns + "\n";
}

void SaveBundles(const fs::path& dir, const std::vector<train::AgentBundle>& bundles,
                 bool memories) {
  fs::create_directories(dir);
  for (std::size_t b = 0; b < bundles.size(); ++b) {
    nn::SaveCheckpoint(dir / ("bundle" + std::to_string(b) + ".ckpt"), bundles[b].net);
    if (!memories) continue;
    for (std::size_t m = 0; m < bundles[b].memories.size(); ++m) {
      bundles[b].memories[m].Save(dir / ("memory" + std::to_string(b) + "_" + std::to_string(m) + ".rrb"));
    }
  }
}

void SaveCheckpointDir(const fs::path& run, const train::NfspRunner& runner) {
  const std::string name = "update_" + std::to_string(runner.updates());
  const fs::path dir = run / "checkpoints" / name;
  SaveBundles(dir, runner.bundles(), true);
  std::ostringstream state;
  state << "update=" << runner.updates() << "\nepisodes=" << runner.episodes() << '\n';
  for (std::size_t b = 0; b < runner.bundles().size(); ++b) {
    state << "rl_updates" << b << '=' << runner.bundles()[b].rl_updates << '\n'
          << "sl_updates" << b << '=' << runner.bundles()[b].sl_updates << '\n';
  }
  WriteFile(dir / "state.txt", state.str());
  WriteFile(run / "checkpoints" / "LATEST", name + "\n");
}

std::map<std::string, std::int64_t> ReadState(const fs::path& path) {
  std::map<std::string, std::int64_t> out;
  std::istringstream in(ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = std::stoll(line.substr(eq + 1));
  }
  return out;
}

// Drives rounds until the budget, writing metrics rows, probes and periodic
// checkpoints.
void TrainLoop(const RunConfig& c, train::NfspRunner& runner, const fs::path& run,
               std::ostream& metrics) {
  const std::int64_t horizon = c.episodes > 0 ? c.episodes : std::int64_t{1000000000000};
  const std::vector<std::int64_t> points = train::LogProbeSchedule(c.probe_start, horizon, c.probe_per_decade);
  std::size_t next = 0;
  while (next < points.size() && points[next] <= runner.episodes()) ++next;
  auto done = [&] {
    return (c.updates > 0 && runner.updates() >= c.updates) ||
           (c.episodes > 0 && runner.episodes() >= c.episodes);
  };
  while (!done()) {
    const std::vector<train::UpdateRecord> recs = runner.Round();
    bool crossed = false;
    while (next < points.size() && points[next] <= runner.episodes()) {
      ++next;
      crossed = true;
    }
    std::optional<ProbeResult> probe;
    if (crossed || done()) probe = Probe(c, runner.bundles(), runner.episodes());
    metrics << MetricsRow(recs, probe ? &*probe : nullptr) << '\n' << std::flush;
    if (probe) {
      spdlog::info("update {} episodes {} probe {}{}", runner.updates(), runner.episodes(),
                   probe->winrates.empty() ? std::string("-") : Fmt(probe->winrates[0]),
                   probe->exploitability ? " exploitability " + Fmt(*probe->exploitability) : "");
    }
    if (c.checkpoint_every > 0 && runner.updates() % c.checkpoint_every == 0) {
      SaveCheckpointDir(run, runner);
    }
  }
}

std::vector<train::AgentBundle> Pretrain(const RunConfig& c, const fs::path& run) {
  std::ofstream metrics(run / "pretrain_metrics.csv");
  metrics << MetricsHeader(c);
  train::TransferOptions opt;
  opt.copy_sl = c.transfer_sl;
  opt.copy_value = c.transfer_value;
  train::TrainConfig nf = MakeTrainConfig(c);
  nf.mode = train::Mode::kNfsp;
  train::PretrainResult res = train::PretrainBundles(
      nf, c.pretrain_updates, opt,
      [&](const std::vector<train::UpdateRecord>& r) { metrics << MetricsRow(r, nullptr) << '\n'; });
  nn::SaveCheckpoint(run / "selfplay.ckpt", res.selfplay);
  nn::SaveCheckpoint(run / "pretrain.ckpt", res.bundles.front().net);
  return std::move(res.bundles);
}

void FinalReport(const RunConfig& c, const std::vector<train::AgentBundle>& bundles,
                 const fs::path& run, std::ostream& out) {
  SaveBundles(run / "final", bundles, false);
  const auto opps = ProbeOpponents(c);
  const nn::Head head = ResolveHead(c);
  const train::NetworkPolicy agent(std::make_shared<const nn::Network>(bundles.front().net), head,
                                   "agent");
  const auto opp = LoadPolicy(opps.empty() ? "uniform" : opps.front(), head);
  const eval::EvalReport report = eval::EvaluateWinrate(agent, *opp, MakeGameSpec(c), c.games, c.eval_seed);
  eval::WriteReport(run / "report.json", report);
  out << eval::ReportToJson(report) << '\n';
}

void Train(RunConfig c, std::ostream& out) {
  fs::path run;
  std::optional<std::vector<train::AgentBundle>> bundles;
  std::int64_t start_update = 0, start_episodes = 0;
  if (!c.resume.empty()) {
    run = c.resume;
    const fs::path latest_file = run / "checkpoints" / "LATEST";
    if (!fs::exists(latest_file)) throw MissingDataError("no checkpoint to resume: " + latest_file.string());
    std::string latest = ReadFile(latest_file);
    while (!latest.empty() && (latest.back() == '\n' || latest.back() == '\r')) latest.pop_back();
    const fs::path dir = run / "checkpoints" / latest;
    const auto state = ReadState(dir / "state.txt");
    start_update = state.at("update");
    start_episodes = state.at("episodes");
    train::TrainConfig tc = MakeTrainConfig(c);
    std::vector<train::AgentBundle> loaded = train::MakeBundles(tc);
    for (std::size_t b = 0; b < loaded.size(); ++b) {
      loaded[b].net = nn::LoadCheckpoint(dir / ("bundle" + std::to_string(b) + ".ckpt"));
      loaded[b].rl_updates = state.at("rl_updates" + std::to_string(b));
      loaded[b].sl_updates = state.at("sl_updates" + std::to_string(b));
      for (std::size_t m = 0; m < loaded[b].memories.size(); ++m) {
        loaded[b].memories[m] = sl::ReservoirBuffer::Load(
            dir / ("memory" + std::to_string(b) + "_" + std::to_string(m) + ".rrb"));
      }
    }
    bundles = std::move(loaded);
    // Drop metric rows written after the checkpoint.
    std::istringstream old(ReadFile(run / "metrics.csv"));
    std::ostringstream kept;
    std::string line;
    while (std::getline(old, line)) {
      if (line.empty()) continue;
      if (line[0] == '#' || line.rfind("update,", 0) == 0) {
        kept << line << '\n';
        continue;
      }
      if (std::stoll(line.substr(0, line.find(','))) <= start_update) kept << line << '\n';
    }
    WriteFile(run / "metrics.csv", kept.str());
    spdlog::info("resuming {} at update {}", run.string(), start_update);
  } else {
    run = ResolveRunDir(c);
    fs::create_directories(run);
    WriteFile(run / "metrics.csv", MetricsHeader(c));
  }
  WriteFile(run / "config.txt", EmitConfig(c));
  if (!bundles && c.mode == "pretrain-then-nfsp") bundles = Pretrain(c, run);
  train::TrainConfig tc = MakeTrainConfig(c);
  train::NfspRunner runner(tc, std::move(bundles), start_update, start_episodes);
  std::ofstream metrics(run / "metrics.csv", std::ios::app);
  TrainLoop(c, runner, run, metrics);
  if (c.checkpoint_every > 0 && runner.updates() % c.checkpoint_every != 0) {
    SaveCheckpointDir(run, runner);
  }
  FinalReport(c, runner.bundles(), run, out);
  out << "run directory: " << run.string() << '\n';
}

void PretrainCommand(const RunConfig& c, std::ostream& out) {
  const fs::path run = ResolveRunDir(c);
  fs::create_directories(run);
  WriteFile(run / "config.txt", EmitConfig(c));
  const auto bundles = Pretrain(c, run);
  if (!c.checkpoint.empty()) nn::SaveCheckpoint(c.checkpoint, bundles.front().net);
  out << "pretrained checkpoint: " << (run / "pretrain.ckpt").string() << '\n';
}

void Eval(const RunConfig& c, std::ostream& out) {
  if (c.checkpoint.empty()) throw ConfigError("eval needs checkpoint=<path>");
  const nn::Head head = ResolveHead(c);
  const train::NetworkPolicy agent(
      std::make_shared<const nn::Network>(nn::LoadCheckpoint(c.checkpoint)), head, "agent");
  const auto opp = LoadPolicy(c.opponent, head);
  const eval::EvalReport report = eval::EvaluateWinrate(agent, *opp, MakeGameSpec(c), c.games, c.eval_seed);
  const fs::path run = ResolveRunDir(c);
  fs::create_directories(run);
  WriteFile(run / "config.txt", EmitConfig(c));
  eval::WriteReport(run / "report.json", report);
  out << eval::ReportToJson(report) << '\n';
}

void Exploit(const RunConfig& c, std::ostream& out) {
  if (c.target.empty()) throw ConfigError("exploit needs target=<checkpoint or scripted name>");
  const auto target = LoadPolicy(c.target, ResolveHead(c));
  const fs::path run = ResolveRunDir(c);
  fs::create_directories(run);
  WriteFile(run / "config.txt", EmitConfig(c));
  eval::ExploiterConfig ec;
  ec.train = MakeTrainConfig(c);
  ec.eval_games = c.games;
  ec.eval_seed = c.eval_seed;
  std::ofstream metrics(run / "metrics.csv");
  metrics << MetricsHeader(c);
  train::RunHooks hooks;
  hooks.on_update = [&](const train::UpdateRecord& r) { metrics << MetricsRow({r}, nullptr) << '\n'; };
  const eval::ExploiterResult res = eval::TrainExploiter(target, ec, hooks);
  nn::SaveCheckpoint(run / "exploiter.ckpt", res.exploiter.net);
  eval::WriteReport(run / "report.json", res.report);
  out << eval::ReportToJson(res.report) << '\n';
}

void Curve(const RunConfig& c, std::ostream& out) {
  if (c.metrics.empty()) throw ConfigError("curve needs metrics=<path to metrics.csv>");
  const fs::path metrics = c.metrics;
  const fs::path curve = c.out.empty() ? metrics.parent_path() / "curve.csv" : fs::path(c.out);
  EmitLearningCurve(metrics, curve, c.probe_start, c.probe_per_decade);
  out << "curve: " << curve.string() << '\n';
}

void NashConvCommand(const RunConfig& c, std::ostream& out) {
  if (c.checkpoint.empty()) throw ConfigError("nashconv needs checkpoint=<path>");
  if (!envs::IsEnumerable(c.env)) {
    throw ConfigError(c.env + " has no enumerable tree; use the exploit command instead");
  }
  const nn::Head head = ResolveHead(c);
  auto net = std::make_shared<const nn::Network>(nn::LoadCheckpoint(c.checkpoint));
  const auto env = envs::MakeGame(MakeGameSpec(c));
  const eval::NetworkProfile profile(net, head);
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["env"] = c.env;
  j["checkpoint"] = c.checkpoint;
  j["head"] = head == nn::Head::kPolicySl ? "sl" : "rl";
  const envs::Rewards on_policy = eval::ExpectedReturns(*env, profile);
  j["expected_return"] = {on_policy[0], on_policy[1]};
  j["best_response_value"] = {eval::ExactBestResponse(*env, profile, 0).value,
                              eval::ExactBestResponse(*env, profile, 1).value};
  j["nashconv"] = eval::NashConv(*env, profile);
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    WriteFile(fs::path(c.out) / "nashconv.json", j.dump(2) + "\n");
  }
  out << j.dump(2) << '\n';
}

}  // namespace

fs::path ResolveRunDir(const RunConfig& c) {
  if (!c.out.empty()) return c.out;
  const char* root = std::getenv(kOutRootEnv);
  const fs::path base = (root != nullptr && *root != '\0') ? fs::path(root) : fs::path("runs");
  const std::string stem = c.command + "-" + c.env + "-" + c.mode + "-s" + std::to_string(c.seed);
  fs::path dir = base / stem;
  for (int i = 2; fs::exists(dir); ++i) dir = base / (stem + "-" + std::to_string(i));
  return dir;
}

std::shared_ptr<const train::Policy> LoadPolicy(const std::string& spec, nn::Head head) {
  if (spec == "uniform") return std::make_shared<train::UniformPolicy>();
  if (spec == "random" || spec == "simple" || spec == "hit_and_run") {
    return std::make_shared<train::ScriptedPolicy>(envs::ParseScriptKind(spec));
  }
  return std::make_shared<train::NetworkPolicy>(
      std::make_shared<const nn::Network>(nn::LoadCheckpoint(spec)), head,
      fs::path(spec).filename().string());
}

void Dispatch(const RunConfig& config, std::ostream& out) {
  const std::string& cmd = config.command;
  if (cmd == "train") return Train(config, out);
  if (cmd == "pretrain") return PretrainCommand(config, out);
  if (cmd == "eval") return Eval(config, out);
  if (cmd == "exploit") return Exploit(config, out);
  if (cmd == "curve") return Curve(config, out);
  if (cmd == "nashconv") return NashConvCommand(config, out);
  throw ConfigError("unknown command '" + cmd +
                    "' (expected train, pretrain, eval, exploit, curve or nashconv)");
}

int RunMain(const std::string& command, const std::string& config_file,
            const std::vector<std::string>& flags, std::ostream& out, std::ostream& err) {
  try {
    std::string text;
    std::vector<std::string> args = flags;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError("cannot read config file " + config_file);
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    // A resumed run starts from the config recorded in its directory.
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string a = args[i];
      std::string dir;
      if (a == "--resume" || a == "resume") {
        if (i + 1 < args.size()) dir = args[i + 1];
      } else if (a.rfind("--resume=", 0) == 0 || a.rfind("resume=", 0) == 0) {
        dir = a.substr(a.find('=') + 1);
      }
      if (!dir.empty()) {
        std::ifstream in(fs::path(dir) / "config.txt");
        if (!in) throw ConfigError("resume: no config.txt in " + dir);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str() + "\n" + text;
      }
    }
    RunConfig c = ParseConfig(text, args);
    c.command = command;
    ValidateConfig(c);
    Dispatch(c, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

void EmitLearningCurve(const fs::path& metrics, const fs::path& curve, std::int64_t start,
                       int per_decade) {
  std::istringstream in(ReadFile(metrics));
  std::string line, names = "a=none b=none";
  struct Row {
    std::int64_t episodes;
    std::string a, b, x;
  };
  std::vector<Row> probes;
  std::int64_t last = 0;
  bool any = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto semi = line.find("; ");
      if (semi != std::string::npos) names = line.substr(semi + 2);
      continue;
    }
    if (line.rfind("update,", 0) == 0) continue;
    const auto f = Split(line, ',');
    if (f.size() != 16) throw std::runtime_error("metrics: malformed row '" + line + "'");
    any = true;
    last = std::stoll(f[1]);
    if (!f[13].empty() || !f[14].empty() || !f[15].empty()) {
      probes.push_back({last, f[13], f[14], f[15]});
    }
  }
  if (!any) throw MissingDataError("metrics file has no rows: " + metrics.string());
  if (probes.empty()) throw MissingDataError("metrics file has no probe rows: " + metrics.string());
  std::vector<std::int64_t> points = train::LogProbeSchedule(start, last, per_decade);
  if (points.empty()) points.push_back(last);
  std::ostringstream out;
  out << "# nfsp-curve 1; " << names << '\n'
      << "games_experienced,winrate_vs_a,winrate_vs_b,exploitability\n";
  std::size_t used = probes.size();
  for (std::int64_t p : points) {
    std::size_t i = 0;
    while (i < probes.size() && probes[i].episodes < p) ++i;
    if (i == probes.size() || i == used) continue;
    used = i;
    auto na = [](const std::string& s) { return s.empty() ? std::string("NA") : s; };
    out << probes[i].episodes << ',' << na(probes[i].a) << ',' << na(probes[i].b) << ','
        << na(probes[i].x) << '\n';
  }
  WriteFile(curve, out.str());
}

}  // namespace nfsp::cli
