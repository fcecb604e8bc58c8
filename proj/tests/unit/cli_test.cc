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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nfsp/cli/config.h"
#include "nfsp/cli/run.h"
#include "nfsp/common/error.h"
#include "nfsp/eval/winrate.h"
#include "scenarios.h"

namespace nfsp::cli {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("nfsp-cli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Run(const std::string& command, const std::vector<std::string>& flags,
            const std::string& config_file = "") {
  std::ostringstream out, err;
  const int code = RunMain(command, config_file, flags, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> DataRows(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("update,", 0) == 0 ||
        line.rfind("games_experienced,", 0) == 0) {
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

const std::vector<std::string> kTinyKuhn = {
    "env=kuhn",        "batch_size=4",   "batch_time=2",  "games_per_process=4",
    "blocks=1",        "width=8",        "probe_games=50", "probe_start=10",
    "games=100",       "sl_sample=16",  "reservoir_capacity=64"};

std::vector<std::string> With(std::vector<std::string> base, const std::vector<std::string>& more) {
  base.insert(base.end(), more.begin(), more.end());
  return base;
}

TEST_SUITE("cli") {
  TEST_CASE("empty config yields the documented defaults") {
    const RunConfig c = ParseConfig("", {});
    CHECK(c.hp.gamma == 0.99);
    CHECK(c.hp.gae_decay == 0.95);
    CHECK(c.hp.value_clip == 0.1);
    CHECK(c.hp.lr_rl == 0.01);
    CHECK(c.hp.lr_sl == 0.001);
    CHECK(c.hp.entropy_coef == 0.01);
    CHECK(c.hp.value_coef == 0.5);
    CHECK(c.hp.batch_size == 128);
    CHECK(c.hp.batch_time == 50);
    CHECK(c.hp.frame_skip == 50);
    CHECK(c.games == 1000);
    for (const auto& [key, src] : c.provenance) CHECK(src == Source::kDefault);
  }

  TEST_CASE("emit then parse is the identity") {
    RunConfig c = ParseConfig("env=microrts\nlr_rl=0.3\n# note\nshared=false\n",
                              {"--seed", "17", "entropy_coef=0.05", "out=/tmp/x y"});
    const RunConfig back = ParseConfig(EmitConfig(c), {});
    CHECK(back == c);
    CHECK(GetKey(back, "lr_rl") == GetKey(c, "lr_rl"));
  }

  TEST_CASE("out-of-range discount is rejected with its valid range") {
    try {
      ParseConfig("gamma=1.5", {});
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      CHECK(what.find("gamma") != std::string::npos);
      CHECK(what.find("(0, 1]") != std::string::npos);
    }
  }

  TEST_CASE("unknown keys and malformed values name the key") {
    try {
      ParseConfig("learning_rate=3", {});
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("learning_rate") != std::string::npos);
    }
    try {
      ParseConfig("batch_size=many", {});
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("batch_size") != std::string::npos);
    }
    CHECK_THROWS_AS(ParseConfig("shared=perhaps", {}), ConfigError);
    CHECK_THROWS_AS(ParseConfig("just words", {}), ConfigError);
    CHECK_THROWS_AS(ParseConfig("env=go", {}), ConfigError);
  }

  TEST_CASE("flags override file values and record their provenance") {
    const RunConfig c = ParseConfig("seed=3\nupdates=7\n", {"--seed=9"});
    CHECK(c.seed == 9);
    CHECK(c.updates == 7);
    CHECK(c.provenance.at("seed") == Source::kFlag);
    CHECK(c.provenance.at("updates") == Source::kFile);
    CHECK(c.provenance.at("gamma") == Source::kDefault);
    CHECK(SourceName(Source::kFlag) == "flag");
    CHECK(EmitConfig(c).find("flag") != std::string::npos);
  }

  TEST_CASE("presets parse and match their games") {
    for (const char* name : {"biased_pennies", "kuhn", "microrts"}) {
      const RunConfig c = testing::Preset(NFSP_SOURCE_DIR, name);
      CHECK_NOTHROW(MakeTrainConfig(c));
    }
  }

  TEST_CASE("selfplay train writes one metrics row per update and no SL values") {
    TempDir tmp;
    const Outcome r = Run("train", With(kTinyKuhn, {"--mode", "selfplay", "--updates", "10",
                                                     "out=" + (tmp / "run")}));
    REQUIRE(r.code == kExitOk);
    const auto rows = DataRows(tmp / "run/metrics.csv");
    CHECK(rows.size() == 10);
    for (const auto& row : rows) CHECK(row.find(",,") != std::string::npos);
    CHECK(fs::exists(tmp / "run/config.txt"));
    CHECK(fs::exists(tmp / "run/report.json"));
    CHECK(fs::exists(tmp / "run/final/bundle0.ckpt"));
    const eval::EvalReport rep = eval::ReportFromJson(testing::ReadFile(tmp / "run/report.json"));
    CHECK(rep.games == 100);
  }

  TEST_CASE("eval emits a report with the documented schema") {
    TempDir tmp;
    REQUIRE(Run("train", With(kTinyKuhn, {"updates=2", "out=" + (tmp / "run")})).code == kExitOk);
    const Outcome r = Run("eval", {"env=kuhn", "checkpoint=" + (tmp / "run/final/bundle0.ckpt"),
                                   "opponent=uniform", "out=" + (tmp / "eval")});
    REQUIRE(r.code == kExitOk);
    const eval::EvalReport rep = eval::ReportFromJson(r.out);
    CHECK(rep.games == 1000);
    CHECK(rep.headline());
    CHECK(rep.opponent == "uniform");
  }

  TEST_CASE("nashconv reports exact exploitability") {
    TempDir tmp;
    REQUIRE(Run("train", With(kTinyKuhn, {"updates=2", "out=" + (tmp / "run")})).code == kExitOk);
    const Outcome r =
        Run("nashconv", {"env=kuhn", "checkpoint=" + (tmp / "run/final/bundle0.ckpt")});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("\"nashconv\"") != std::string::npos);
    CHECK(Run("nashconv", {"env=microrts", "checkpoint=x"}).code == kExitConfig);
  }

  TEST_CASE("exit codes distinguish config and runtime errors") {
    TempDir tmp;
    CHECK(Run("train", {"gamma=1.5"}).code == kExitConfig);
    CHECK(Run("train", {"bogus=1"}).code == kExitConfig);
    CHECK(Run("eval", {}).code == kExitConfig);
    CHECK(Run("fly", {}).code == kExitConfig);
    CHECK(Run("train", {}, tmp / "absent.cfg").code == kExitConfig);
    const std::string missing = tmp / "missing.ckpt";
    const Outcome r = Run("exploit", {"target=" + missing, "out=" + (tmp / "x")});
    CHECK(r.code == kExitRuntime);
    CHECK(r.err.find(missing) != std::string::npos);
    CHECK(Run("curve", {"metrics=" + (tmp / "none.csv")}).code == kExitRuntime);
  }

  TEST_CASE("the command-line tool maps outcomes to exit codes") {
    TempDir tmp;
    const std::string tool = NFSP_TOOL_PATH;
    auto status = [](const std::string& cmd) {
      const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
      return WEXITSTATUS(raw);
    };
    CHECK(status(tool + " --help") == 0);
    CHECK(status(tool) == 1);
    CHECK(status(tool + " train gamma=1.5") == 1);
    CHECK(status(tool + " exploit target=" + (tmp / "nope.ckpt")) == 2);
    const std::string cfg = tmp / "tiny.cfg";
    std::ofstream(cfg) << "env=rps\nmode=selfplay\nupdates=2\nbatch_size=4\nbatch_time=1\n"
                          "games_per_process=4\nblocks=1\nwidth=4\ngames=10\n";
    CHECK(status(tool + " train -c " + cfg + " --out " + (tmp / "run")) == 0);
    CHECK(fs::exists(tmp / "run/report.json"));
  }

  TEST_CASE("output root comes from the environment") {
    TempDir tmp;
    ::setenv(kOutRootEnv, tmp.path.c_str(), 1);
    RunConfig c = ParseConfig("env=kuhn\nseed=4\n", {});
    c.command = "train";
    const fs::path first = ResolveRunDir(c);
    CHECK(first == tmp.path / "train-kuhn-nfsp-s4");
    fs::create_directories(first);
    CHECK(ResolveRunDir(c) == tmp.path / "train-kuhn-nfsp-s4-2");
    ::unsetenv(kOutRootEnv);
  }

  TEST_CASE("kuhn curves carry exploitability while microrts marks it absent") {
    TempDir tmp;
    REQUIRE(Run("train", With(kTinyKuhn, {"updates=40", "out=" + (tmp / "k")})).code == kExitOk);
    REQUIRE(Run("curve", {"metrics=" + (tmp / "k/metrics.csv"), "probe_start=10"}).code == kExitOk);
    const auto krows = DataRows(tmp / "k/curve.csv");
    REQUIRE_FALSE(krows.empty());
    for (const auto& row : krows) CHECK(row.substr(row.rfind(',') + 1) != "NA");
    const std::string first = testing::ReadFile(tmp / "k/curve.csv");
    REQUIRE(Run("curve", {"metrics=" + (tmp / "k/metrics.csv"), "probe_start=10"}).code == kExitOk);
    CHECK(testing::ReadFile(tmp / "k/curve.csv") == first);

    REQUIRE(Run("train", {"env=microrts", "updates=3", "batch_size=2", "batch_time=2",
                          "games_per_process=2", "blocks=1", "width=8", "arch=mlp",
                          "probe_games=4", "probe_start=1", "games=4", "tick_limit=400",
                          "out=" + (tmp / "m")})
                .code == kExitOk);
    REQUIRE(Run("curve", {"metrics=" + (tmp / "m/metrics.csv"), "probe_start=1"}).code == kExitOk);
    const auto mrows = DataRows(tmp / "m/curve.csv");
    REQUIRE_FALSE(mrows.empty());
    for (const auto& row : mrows) CHECK(row.substr(row.rfind(',') + 1) == "NA");
  }

  TEST_CASE("resumed runs continue metrics at the recorded step") {
    TempDir tmp;
    const std::string run = tmp / "r";
    REQUIRE(Run("train", With(kTinyKuhn, {"updates=6", "checkpoint_every=4", "out=" + run}))
                .code == kExitOk);
    // Simulate a crash after the update-4 checkpoint.
    std::ofstream(run + "/checkpoints/LATEST") << "update_4\n";
    const Outcome r = Run("train", {"--resume", run, "--updates", "8"});
    REQUIRE(r.code == kExitOk);
    const auto rows = DataRows(run + "/metrics.csv");
    REQUIRE(rows.size() == 8);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(std::stoll(rows[i].substr(0, rows[i].find(','))) == static_cast<long long>(i + 1));
    }
    CHECK(Run("train", {"--resume", tmp / "nothing"}).code != kExitOk);
  }
}

}  // namespace
}  // namespace nfsp::cli
