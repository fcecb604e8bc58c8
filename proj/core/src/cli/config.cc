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

#include "nfsp/cli/config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "nfsp/common/error.h"
#include "nfsp/envs/scripted.h"

namespace nfsp::cli {
namespace {

struct Field {
  KeyInfo info;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void BadValue(const std::string& key, const std::string& expected,
                           const std::string& got) {
  throw ConfigError("key '" + key + "' expects " + expected + ", got '" + got + "'");
}

template <typename T>
T ParseValue(const std::string& key, const std::string& v) {
  if constexpr (std::is_same_v<T, bool>) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    BadValue(key, "a boolean (true/false)", v);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_floating_point_v<T>) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
      BadValue(key, "a real number", v);
    }
    return out;
  } else {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
      BadValue(key, std::is_unsigned_v<T> ? "a non-negative integer" : "an integer", v);
    }
    return out;
  }
}

template <typename T>
std::string FormatValue(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  }
}

template <typename T>
const char* TypeName() {
  if constexpr (std::is_same_v<T, bool>) return "bool";
  if constexpr (std::is_same_v<T, std::string>) return "string";
  if constexpr (std::is_floating_point_v<T>) return "real";
  return "int";
}

template <typename T, typename Access>
Field F(const char* key, const char* help, Access access) {
  Field f;
  f.info = {key, TypeName<T>(), help};
  const std::string k = key;
  f.set = [k, access](RunConfig& c, const std::string& v) { access(c) = ParseValue<T>(k, v); };
  f.get = [access](const RunConfig& c) {
    return FormatValue<T>(access(const_cast<RunConfig&>(c)));
  };
  return f;
}

#define NFSP_FIELD(type, key, expr, help) \
  F<type>(key, help, [](RunConfig& c) -> type& { return expr; })

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      NFSP_FIELD(std::string, "env", c.env, "kuhn | biased_pennies | matching_pennies | rps | microrts"),
      NFSP_FIELD(std::string, "mode", c.mode, "nfsp | selfplay | pretrain-then-nfsp"),
      NFSP_FIELD(bool, "shared", c.shared, "one network bundle for both processes"),
      NFSP_FIELD(std::uint64_t, "seed", c.seed, "run seed"),
      NFSP_FIELD(std::int64_t, "updates", c.updates, "update budget (0: none)"),
      NFSP_FIELD(std::int64_t, "episodes", c.episodes, "episode budget (0: none)"),
      NFSP_FIELD(std::int64_t, "max_episode_steps", c.max_episode_steps, "lane reset threshold"),
      NFSP_FIELD(std::string, "out", c.out, "run directory"),
      NFSP_FIELD(std::string, "resume", c.resume, "run directory to continue"),
      NFSP_FIELD(std::int64_t, "checkpoint_every", c.checkpoint_every, "updates between checkpoints (0: final only)"),
      NFSP_FIELD(double, "clip_eps", c.hp.clip_eps, "policy ratio clip"),
      NFSP_FIELD(double, "value_clip", c.hp.value_clip, "value clip"),
      NFSP_FIELD(double, "entropy_coef", c.hp.entropy_coef, "entropy weight"),
      NFSP_FIELD(double, "value_coef", c.hp.value_coef, "value loss weight"),
      NFSP_FIELD(double, "gamma", c.hp.gamma, "discount, in (0, 1]"),
      NFSP_FIELD(double, "gae_decay", c.hp.gae_decay, "advantage decay, in (0, 1]"),
      NFSP_FIELD(double, "lr_rl", c.hp.lr_rl, "RL learning rate"),
      NFSP_FIELD(double, "lr_sl", c.hp.lr_sl, "SL learning rate"),
      NFSP_FIELD(int, "batch_size", c.hp.batch_size, "lanes per update"),
      NFSP_FIELD(int, "batch_time", c.hp.batch_time, "learner decisions per lane per update"),
      NFSP_FIELD(int, "frame_skip", c.hp.frame_skip, "engine ticks per decision (microrts)"),
      NFSP_FIELD(int, "games_per_process", c.hp.games_per_process, "concurrent games per process"),
      NFSP_FIELD(std::int64_t, "reservoir_capacity", c.hp.reservoir_capacity, "reservoir size"),
      NFSP_FIELD(int, "sl_sample", c.hp.sl_sample, "SL minibatch size"),
      NFSP_FIELD(double, "eta", c.hp.eta, "anticipatory parameter (unused)"),
      NFSP_FIELD(double, "max_grad_norm", c.hp.max_grad_norm, "global gradient norm clip"),
      NFSP_FIELD(int, "epochs", c.hp.epochs, "PPO steps per batch"),
      NFSP_FIELD(std::string, "arch", c.arch, "auto | mlp | conv"),
      NFSP_FIELD(int, "blocks", c.blocks, "body blocks (0: game default)"),
      NFSP_FIELD(int, "width", c.width, "block width or channels (0: game default)"),
      NFSP_FIELD(int, "pool_every", c.pool_every, "conv blocks per 2x2 max pool"),
      NFSP_FIELD(double, "leaky_slope", c.leaky_slope, "leaky ReLU slope"),
      NFSP_FIELD(std::string, "norm", c.norm, "frozen | batch"),
      NFSP_FIELD(int, "map_size", c.map_size, "microrts map side"),
      NFSP_FIELD(int, "tick_limit", c.tick_limit, "microrts tick limit"),
      NFSP_FIELD(int, "vision_radius", c.vision_radius, "microrts vision radius"),
      NFSP_FIELD(std::string, "probe_opponents", c.probe_opponents, "auto or up to two of random,simple,hit_and_run,uniform"),
      NFSP_FIELD(std::int64_t, "probe_games", c.probe_games, "games per win-rate probe"),
      NFSP_FIELD(int, "probe_per_decade", c.probe_per_decade, "probe points per factor of ten episodes"),
      NFSP_FIELD(std::int64_t, "probe_start", c.probe_start, "first probe point (episodes)"),
      NFSP_FIELD(std::int64_t, "pretrain_updates", c.pretrain_updates, "self-play updates before transfer"),
      NFSP_FIELD(bool, "transfer_sl", c.transfer_sl, "initialise pi_SL from pi_RL on transfer"),
      NFSP_FIELD(bool, "transfer_value", c.transfer_value, "copy V_RL on transfer"),
      NFSP_FIELD(std::string, "checkpoint", c.checkpoint, "network checkpoint path"),
      NFSP_FIELD(std::string, "target", c.target, "exploit target: checkpoint path or scripted name"),
      NFSP_FIELD(std::string, "opponent", c.opponent, "eval opponent: scripted name, uniform or checkpoint path"),
      NFSP_FIELD(std::string, "head", c.head, "auto | sl | rl"),
      NFSP_FIELD(std::int64_t, "games", c.games, "evaluation games"),
      NFSP_FIELD(std::uint64_t, "eval_seed", c.eval_seed, "evaluation seed"),
      NFSP_FIELD(std::string, "metrics", c.metrics, "metrics CSV for the curve command"),
  };
  return fields;
}

#undef NFSP_FIELD

const Field& Find(const std::string& key) {
  for (const Field& f : Fields()) {
    if (f.info.key == key) return f;
  }
  throw ConfigError("unknown key '" + key + "'");
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void OneOf(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return;
    list += list.empty() ? a : std::string(" | ") + a;
  }
  BadValue(key, "one of " + list, v);
}

std::vector<std::string> SplitComma(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::string SourceName(Source s) {
  switch (s) {
    case Source::kDefault: return "default";
    case Source::kFile: return "file";
    case Source::kFlag: return "flag";
  }
  return "?";
}

const std::vector<KeyInfo>& ConfigKeys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> k;
    for (const Field& f : Fields()) k.push_back(f.info);
    return k;
  }();
  return keys;
}

bool RunConfig::operator==(const RunConfig& o) const {
  if (command != o.command) return false;
  for (const Field& f : Fields()) {
    if (f.get(*this) != f.get(o)) return false;
  }
  return true;
}

void SetKey(RunConfig& config, const std::string& key, const std::string& value, Source source) {
  Find(key).set(config, value);
  config.provenance[key] = source;
}

std::string GetKey(const RunConfig& config, const std::string& key) {
  return Find(key).get(config);
}

void ApplyText(RunConfig& config, const std::string& text, Source source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + line +
                        "'");
    }
    SetKey(config, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), source);
  }
}

RunConfig ParseConfig(const std::string& file_text, const std::vector<std::string>& flags) {
  RunConfig config;
  for (const Field& f : Fields()) config.provenance[f.info.key] = Source::kDefault;
  ApplyText(config, file_text, Source::kFile);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    std::string arg = flags[i];
    if (arg.rfind("--", 0) == 0) arg = arg.substr(2);
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      SetKey(config, arg.substr(0, eq), arg.substr(eq + 1), Source::kFlag);
    } else if (i + 1 < flags.size()) {
      SetKey(config, arg, flags[++i], Source::kFlag);
    } else {
      Find(arg);  // unknown keys report first
      throw ConfigError("key '" + arg + "' is missing a value");
    }
  }
  ValidateConfig(config);
  return config;
}

std::string EmitConfig(const RunConfig& config) {
  std::ostringstream out;
  out << "# nfsp run config, format 1\n";
  for (const Field& f : Fields()) {
    auto it = config.provenance.find(f.info.key);
    const Source src = it == config.provenance.end() ? Source::kDefault : it->second;
    out << f.info.key << '=' << f.get(config) << "  # " << SourceName(src) << '\n';
  }
  return out.str();
}

void ValidateConfig(const RunConfig& c) {
  c.hp.Validate();
  OneOf("env", c.env, {"kuhn", "biased_pennies", "matching_pennies", "rps", "microrts"});
  OneOf("mode", c.mode, {"nfsp", "selfplay", "pretrain-then-nfsp"});
  OneOf("arch", c.arch, {"auto", "mlp", "conv"});
  OneOf("norm", c.norm, {"frozen", "batch"});
  OneOf("head", c.head, {"auto", "sl", "rl"});
  if (c.updates < 0 || c.episodes < 0) throw ConfigError("updates and episodes must be >= 0");
  if (c.command == "train" && c.updates == 0 && c.episodes == 0 && c.resume.empty()) {
    throw ConfigError("updates or episodes must be positive");
  }
  if (c.blocks < 0 || c.width < 0) throw ConfigError("blocks and width must be >= 0");
  if (c.games < 1) throw ConfigError("games must be >= 1");
  if (c.probe_games < 1) throw ConfigError("probe_games must be >= 1");
  if (c.probe_per_decade < 1) throw ConfigError("probe_per_decade must be >= 1");
  if (c.checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (c.pretrain_updates < 1) throw ConfigError("pretrain_updates must be >= 1");
  if (c.probe_opponents != "auto") {
    const auto names = SplitComma(c.probe_opponents);
    if (names.empty() || names.size() > 2) {
      BadValue("probe_opponents", "auto or one or two comma-separated names", c.probe_opponents);
    }
    for (const auto& n : names) OneOf("probe_opponents", n, {"random", "simple", "hit_and_run", "uniform"});
  }
  try {
    MakeGameSpec(c).microrts.Validate();
    MakeArch(c).Validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

envs::GameSpec MakeGameSpec(const RunConfig& c) {
  envs::GameSpec g;
  g.name = c.env;
  g.microrts.map_size = c.map_size;
  g.microrts.frame_skip = c.hp.frame_skip;
  g.microrts.tick_limit = c.tick_limit;
  g.microrts.vision_radius = c.vision_radius;
  return g;
}

nn::ArchSpec MakeArch(const RunConfig& c) {
  const auto env = envs::MakeGame(MakeGameSpec(c));
  const envs::ObservationShape shape = env->observation_shape();
  const bool conv = c.arch == "conv" || (c.arch == "auto" && c.env == "microrts");
  nn::ArchSpec spec =
      conv ? nn::ArchSpec::Conv(shape.channels, shape.height, shape.width, c.blocks ? c.blocks : 4,
                                c.width ? c.width : 64, env->num_actions())
           : nn::ArchSpec::Mlp(shape.size(), c.blocks ? c.blocks : 2, c.width ? c.width : 64,
                               env->num_actions());
  spec.pool_every = c.pool_every;
  spec.leaky_slope = c.leaky_slope;
  spec.norm = c.norm == "batch" ? nn::NormMode::kBatchStatistics : nn::NormMode::kFrozenAffine;
  return spec;
}

train::TrainConfig MakeTrainConfig(const RunConfig& c) {
  train::TrainConfig t;
  t.game = MakeGameSpec(c);
  t.arch = MakeArch(c);
  t.hp = c.hp;
  t.mode = c.mode == "selfplay" ? train::Mode::kSelfPlay : train::Mode::kNfsp;
  t.shared = c.shared;
  t.seed = c.seed;
  t.max_updates = c.updates;
  t.max_episodes = c.episodes;
  t.max_episode_steps = c.max_episode_steps;
  return t;
}

}  // namespace nfsp::cli
