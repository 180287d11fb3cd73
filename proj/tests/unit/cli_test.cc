// Copyright 2026 The s2st Authors.
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

#include <stdlib.h>
#include <unistd.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "s2st/cli/commands.h"
#include "s2st/cli/run_config.h"
#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/train/checkpoint.h"
#include "s2st/train/trainer.h"

using namespace s2st;
using namespace s2st::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("s2st_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

int Run(std::vector<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  args.insert(args.begin(), "s2st");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = Main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

json ReadJson(const fs::path& p) { return json::parse(ReadFileBytes(p)); }

// Small toy run: a tiny corpus and very short stages.
void WriteSmallConfig(const fs::path& path) {
  const json j = {
      {"profile", "toy"},
      {"seed", 3},
      {"toy", {{"n_primary", 4}, {"n_secondary", 6}, {"n_eval", 3}}},
      {"model", {{"enc_dim", 32}, {"dec_dim", 32}, {"ffn_dim", 64}, {"dec_ffn_dim", 64},
                 {"prenet_hidden", 32}, {"postnet_channels", 8}, {"aux_dim", 16},
                 {"aux_ffn_dim", 32}, {"subsample_channels", 4}}},
      {"stages", json::array({{{"kind", "pretrain"}, {"max_steps", 3}},
                              {{"kind", "finetune"}, {"max_steps", 3}},
                              {{"kind", "prompt"}, {"max_steps", 3}}})},
      {"eval", {{"decode", {{"max_len", 8}}}}}};
  WriteFileBytes(path, j.dump(2));
}

}  // namespace

TEST_CASE("fisher profile carries the published configuration") {
  const RunConfig c = ProfileConfig("fisher");
  CHECK(c.model.enc_layers == 12);
  CHECK(c.model.enc_dim == 512);
  CHECK(c.model.dec_layers == 6);
  CHECK(c.model.dec_dim == 512);
  CHECK(c.model.aux_src_layers == 1);
  CHECK(c.model.aux_dim == 64);
  CHECK(c.model.dropout == 0.1);
  CHECK(c.frontend.src_sample_rate == 8000);
  CHECK(c.frontend.tgt_sample_rate == 24000);
  CHECK(c.model.tap_src == 6);
  CHECK(c.model.tap_tgt == 9);
  CHECK(c.model.w_src == 0.3);
  CHECK(c.model.w_tgt == 0.3);
  const train::StageConfig s = c.Stage(train::StageKind::kFinetune);
  CHECK(s.base_lr == 0.006);
  CHECK(s.warmup_steps == 4000);
  CHECK(s.batch_tokens == 60000);
}

TEST_CASE("teden2zh profile carries the published configuration") {
  const RunConfig c = ProfileConfig("teden2zh");
  CHECK(c.model.tap_src == 4);
  CHECK(c.model.tap_tgt == 9);
  CHECK(c.model.aux_src_layers == 4);
  CHECK(c.model.aux_tgt_layers == 4);
  CHECK(c.model.aux_dim == 64);
  CHECK(c.frontend.src_sample_rate == 16000);
  const train::StageConfig s = c.Stage(train::StageKind::kMixed);
  CHECK(s.warmup_steps == 4000);
  CHECK(s.base_lr == 0.0015);
  CHECK(s.batch_tokens == 45000);
  CHECK_THROWS_AS(ProfileConfig("librispeech"), ConfigError);
}

TEST_CASE("config validation names the offending key") {
  const fs::path base = fs::current_path();
  auto message = [&](const json& tree) {
    try {
      ConfigFromJson(tree, base);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message({{"profile", "fisher"}, {"model", {{"tap_src", 13}}}}).find("tap_src") !=
        std::string::npos);
  CHECK(message({{"colour", "blue"}}).find("colour: unknown key") != std::string::npos);
  CHECK(message({{"model", {{"enc_layerz", 3}}}}).find("enc_layerz") != std::string::npos);
  CHECK(message({{"paths", {{"outdir", "x"}}}}).find("paths.outdir") != std::string::npos);
  CHECK(message({{"stages", json::array({{{"kind", "finetune"}}, {{"kind", "pretrain"}}})}})
            .find("pretrain must come before") != std::string::npos);
  CHECK(message({{"stages", json::array({{{"kind", "prompt"}}})},
                 {"model", {{"prompt_enabled", false}}}})
            .find("prompt") != std::string::npos);
  CHECK(message({{"stages", json::array({{{"kind", "finetune"}, {"base_lr", 0}}})}})
            .find("base_lr") != std::string::npos);
  CHECK(message({{"profile", "toy"}}).empty());
}

TEST_CASE("overrides edit nested keys and stages by kind") {
  json tree = {{"stages", json::array({{{"kind", "pretrain"}, {"max_steps", 5}}})}};
  ApplyOverride(tree, "model.enc_layers=3");
  ApplyOverride(tree, "stages.pretrain.max_steps=7");
  ApplyOverride(tree, "stages.finetune.base_lr=0.01");
  ApplyOverride(tree, "paths.output_dir=out dir");
  ApplyOverride(tree, "seed=9");
  CHECK(tree["model"]["enc_layers"] == 3);
  CHECK(tree["stages"][0]["max_steps"] == 7);
  CHECK(tree["stages"][1]["kind"] == "finetune");
  CHECK(tree["stages"][1]["base_lr"] == 0.01);
  CHECK(tree["paths"]["output_dir"] == "out dir");
  CHECK_THROWS_AS(ApplyOverride(tree, "seed"), ConfigError);
  CHECK_THROWS_AS(ApplyOverride(tree, "stages.7.max_steps=1"), ConfigError);

  const RunConfig c = ConfigFromJson(tree, fs::current_path());
  CHECK(c.model.enc_layers == 3);
  CHECK(c.Stage(train::StageKind::kPretrain).max_steps == 7);
  CHECK(c.Stage(train::StageKind::kFinetune).base_lr == 0.01);
  // Stages inherit the run seed unless they set their own.
  CHECK(c.Stage(train::StageKind::kFinetune).seed == 9);
  CHECK(c.Stage(train::StageKind::kMixed).seed == 9);
}

TEST_CASE("output root comes from the environment") {
  TempDir dir("env");
  ::setenv("S2ST_OUTPUT_ROOT", dir.path().c_str(), 1);
  const RunConfig c = ConfigFromJson({{"paths", {{"output_dir", "exp"}}}}, "/somewhere");
  ::unsetenv("S2ST_OUTPUT_ROOT");
  CHECK(c.paths.output_dir == dir.path() / "exp");
  CHECK(c.paths.data_dir == fs::path("/somewhere") / "data");
  const RunConfig d = ConfigFromJson({{"paths", {{"output_dir", "exp"}}}}, "/somewhere");
  CHECK(d.paths.output_dir == fs::path("/somewhere") / "exp");
}

TEST_CASE("usage errors exit with status 2") {
  std::string err;
  CHECK(Run({}, nullptr, &err) == 2);
  CHECK(Run({"transmogrify"}) == 2);
  CHECK(Run({"finetune", "--frobnicate"}) == 2);
  CHECK(Run({"translate", "--in", "x.wav"}) == 2);
  std::string out;
  CHECK(Run({"--help"}, &out) == 0);
  CHECK(out.find("prompttune") != std::string::npos);
}

TEST_CASE("runtime errors exit with status 1 and are recorded") {
  TempDir dir("fail");
  const fs::path cfg = dir.path() / "run.json";
  WriteSmallConfig(cfg);
  std::string err;
  CHECK(Run({"evaluate", "--config", cfg.string(), "--ckpt", (dir.path() / "none.ckpt").string()},
            nullptr, &err) == 1);
  CHECK(err.find("none.ckpt") != std::string::npos);
  const json m = ReadJson(dir.path() / "runs" / "run_manifest.json");
  CHECK(m["status"] == "error");
  CHECK(m["errors"].size() == 1);
  CHECK(Run({"finetune", "--config", cfg.string(), "--set", "model.tap_src=5"}) == 1);
}

TEST_CASE("the full command chain runs and matches direct module calls") {
  TempDir dir("chain");
  const fs::path cfg_path = dir.path() / "run.json";
  WriteSmallConfig(cfg_path);
  const std::string cfg = cfg_path.string();
  REQUIRE(Run({"gen-toy", "--config", cfg}) == 0);
  REQUIRE(Run({"prepare", "--config", cfg}) == 0);
  const json prep = ReadJson(dir.path() / "data" / "run_manifest.json");
  CHECK(prep["command"] == "prepare");
  CHECK(prep["status"] == "ok");
  REQUIRE(Run({"pretrain", "--config", cfg}) == 0);
  const fs::path pre_ckpt = dir.path() / "runs" / "pretrain" / "pretrain_final.ckpt";
  REQUIRE(fs::exists(pre_ckpt));
  REQUIRE(Run({"prompttune", "--config", cfg, "--init", pre_ckpt.string()}) == 0);
  const fs::path ckpt = dir.path() / "runs" / "prompt" / "prompt_final.ckpt";
  REQUIRE(fs::exists(ckpt));

  // Same stage through the library.
  const RunConfig rc = LoadConfig(cfg_path);
  auto m = train::LoadModel(pre_ckpt);
  train::StageInputs inputs{data::ReadManifest(rc.PrimaryManifest()),
                            data::ReadManifest(rc.SecondaryManifest())};
  train::RunStageOptions opts;
  opts.out_dir = dir.path() / "direct";
  const auto direct =
      train::RunStage(*m, rc.Stage(train::StageKind::kPrompt), inputs, opts);
  CHECK(ReadFileBytes(direct.final_checkpoint) == ReadFileBytes(ckpt));

  std::string table;
  REQUIRE(Run({"evaluate", "--config", cfg, "--ckpt", ckpt.string()}, &table) == 0);
  CHECK(table.find("Tp-BLEU") != std::string::npos);
  const fs::path report = dir.path() / "runs" / "eval" / "report.json";
  REQUIRE(fs::exists(report));
  CHECK(fs::exists(dir.path() / "runs" / "eval" / "report.txt"));
  eval::EvalConfig ecfg = rc.EvalConfig();
  const eval::EvalReport direct_report =
      eval::Evaluate(*train::LoadModel(ckpt), data::ReadManifest(rc.EvalManifest()), ecfg);
  CHECK(ReadJson(report) == json::parse(direct_report.ToJson().dump()));

  const fs::path wav = dir.path() / "data" / "audio" / "e00000.wav";
  const fs::path out = dir.path() / "tr" / "y.wav";
  REQUIRE(Run({"translate", "--config", cfg, "--ckpt", ckpt.string(), "--in", wav.string(),
               "--out", out.string(), "--prompt", "primary"}) == 0);
  CHECK(fs::exists(out));
  CHECK(fs::exists(dir.path() / "tr" / "y.mel"));
  const json tm = ReadJson(dir.path() / "tr" / "run_manifest.json");
  CHECK(tm["status"] == "ok");
  CHECK(tm["artifacts"].size() == 3);
}

TEST_CASE("a checkpoint from another model config is refused") {
  TempDir dir("mismatch");
  const fs::path cfg_path = dir.path() / "run.json";
  WriteSmallConfig(cfg_path);
  const std::string cfg = cfg_path.string();
  REQUIRE(Run({"gen-toy", "--config", cfg}) == 0);
  REQUIRE(Run({"prepare", "--config", cfg}) == 0);
  REQUIRE(Run({"finetune", "--config", cfg}) == 0);
  const fs::path ckpt = dir.path() / "runs" / "finetune" / "finetune_final.ckpt";
  std::string err;
  CHECK(Run({"evaluate", "--config", cfg, "--ckpt", ckpt.string(), "--set", "model.dropout=0.3"},
            nullptr, &err) == 1);
  CHECK(err.find("fingerprint") != std::string::npos);
}
