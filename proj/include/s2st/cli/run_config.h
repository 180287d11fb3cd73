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

#ifndef S2ST_CLI_RUN_CONFIG_H_
#define S2ST_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2st/data/toy_corpus.h"
#include "s2st/eval/evaluate.h"
#include "s2st/model/config.h"
#include "s2st/train/stage.h"

namespace s2st::cli {

// Sample rates and hop of the source and target feature extractors.
struct FrontendSettings {
  int src_sample_rate = 8000;
  int tgt_sample_rate = 24000;
  int tgt_hop_length = 240;

  audio::FrontendConfig Source() const;
  audio::FrontendConfig Target() const;
};

struct PathSettings {
  // Root of every artifact written by a run.
  std::filesystem::path output_dir = "runs";
  // Toy corpus directory; prepared manifests live in data_dir/prepared.
  std::filesystem::path data_dir = "data";
  // Prepared manifests; empty means data_dir/prepared/<name>.jsonl.
  std::filesystem::path primary, secondary, eval;
  // External client commands speaking the line protocol. Empty selects the
  // in-process toy services.
  std::string mt_command, tts_command, asr_command;
};

struct EvalSettings {
  eval::DecodeConfig decode;
  eval::PromptPolicy prompt = eval::PromptPolicy::kAuto;
  bool spectrogram_l1 = true;
  bool asr_bleu = false;
  int griffin_lim_iterations = 32;
  double stop_threshold = 0.5;
};

struct RunConfig {
  std::string profile = "toy";
  uint64_t seed = 1;
  model::ModelConfig model;
  std::vector<train::StageConfig> stages;
  FrontendSettings frontend;
  PathSettings paths;
  data::ToySpec toy;
  EvalSettings eval;

  // The stage of `kind` from `stages`, else the profile default for it.
  train::StageConfig Stage(train::StageKind kind) const;
  eval::EvalConfig EvalConfig() const;

  std::filesystem::path PrimaryManifest() const;
  std::filesystem::path SecondaryManifest() const;
  std::filesystem::path EvalManifest() const;

  // Model, stage, toy and ordering rules. Throws ConfigError naming the key.
  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  uint64_t Fingerprint() const;
};

// Names accepted by "profile".
std::vector<std::string> ProfileNames();
// Defaults of a named profile; unknown names raise ConfigError.
RunConfig ProfileConfig(const std::string& name);

// Applies "a.b.c=value" to a JSON tree. Values parse as JSON when possible
// and as strings otherwise. Inside "stages" a path segment may name a stage
// kind instead of an index; a missing stage of that kind is appended.
void ApplyOverride(nlohmann::json& tree, const std::string& assignment);

// Builds a validated config from a JSON tree. Unknown keys raise
// ConfigError naming the key. Relative paths resolve against `base_dir`,
// except output_dir, which resolves against $S2ST_OUTPUT_ROOT when set.
RunConfig ConfigFromJson(const nlohmann::json& tree, const std::filesystem::path& base_dir);

// Reads a JSON config file, applies overrides in order and validates.
RunConfig LoadConfig(const std::filesystem::path& path,
                     const std::vector<std::string>& overrides = {});

}  // namespace s2st::cli

#endif  // S2ST_CLI_RUN_CONFIG_H_
