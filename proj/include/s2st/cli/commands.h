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

#ifndef S2ST_CLI_COMMANDS_H_
#define S2ST_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "s2st/cli/run_config.h"
#include "s2st/data/client.h"
#include "s2st/data/toy_dataset.h"
#include "s2st/eval/evaluate.h"
#include "s2st/train/trainer.h"

namespace s2st::cli {

// Record of one command invocation, written as run_manifest.json in the
// command's output directory.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  uint64_t config_fingerprint = 0;
  std::vector<std::pair<std::string, std::string>> artifacts;  // (kind, path)
  std::vector<std::string> errors;

  void Add(const std::string& kind, const std::filesystem::path& path);
  nlohmann::ordered_json ToJson() const;
  void Write(const std::filesystem::path& dir) const;
};

// Module operations behind each subcommand. Each records its outputs in
// `manifest` and returns the directory the manifest belongs in.

std::filesystem::path GenToy(const RunConfig& cfg, RunManifest& manifest);
std::filesystem::path Prepare(const RunConfig& cfg, RunManifest& manifest);

struct TrainRequest {
  train::StageKind kind = train::StageKind::kFinetune;
  // Starting checkpoint; fresh parameters from (model config, seed) when
  // absent.
  std::optional<std::filesystem::path> init;
  std::optional<std::filesystem::path> resume;
};
std::filesystem::path Train(const RunConfig& cfg, const TrainRequest& request,
                            RunManifest& manifest);

struct TranslateRequest {
  std::filesystem::path checkpoint;
  std::filesystem::path input;
  // Output wav; the mel lands next to it with extension .mel.
  std::filesystem::path output;
  eval::PromptPolicy prompt = eval::PromptPolicy::kAuto;
};
std::filesystem::path Translate(const RunConfig& cfg, const TranslateRequest& request,
                                RunManifest& manifest);

struct EvaluateRequest {
  std::filesystem::path checkpoint;
  // Defaults to the configured held-out manifest.
  std::optional<std::filesystem::path> manifest;
  // Report stem; defaults to <output_dir>/eval/report.
  std::optional<std::filesystem::path> out;
};
std::filesystem::path Evaluate(const RunConfig& cfg, const EvaluateRequest& request,
                               RunManifest& manifest, eval::EvalReport* report = nullptr);

// Finite-difference suite; true when every primitive is below 1e-4 and the
// full model loss below 1e-3.
bool GradCheck(const RunConfig& cfg, RunManifest& manifest, std::ostream& out,
               std::filesystem::path* dir = nullptr);

// Client for a configured command, or the in-process toy service.
std::unique_ptr<data::Client> MakeMtClient(const RunConfig& cfg, const data::ToyCorpus& corpus);
std::unique_ptr<data::Client> MakeTtsClient(const RunConfig& cfg, const data::ToySpec& spec,
                                            const std::filesystem::path& out_dir);
std::unique_ptr<data::Client> MakeAsrClient(const RunConfig& cfg);

// Entry point: exit 0 on success, 1 on a runtime error, 2 on a usage error.
int Main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace s2st::cli

#endif  // S2ST_CLI_COMMANDS_H_
