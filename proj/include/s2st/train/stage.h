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

#ifndef S2ST_TRAIN_STAGE_H_
#define S2ST_TRAIN_STAGE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "s2st/model/config.h"
#include "s2st/model/loss.h"

namespace s2st::train {

enum class StageKind { kPretrain, kFinetune, kMixed, kPrompt };

std::string_view StageKindName(StageKind k);
StageKind ParseStageKind(std::string_view s);

// How pre-training balances the two auxiliary tasks.
enum class PretrainMode {
  kEqualWeights,  // 0.5 * aux_src + 0.5 * aux_tgt in every batch
  kAlternating,   // odd steps source task only, even steps target task only
};

struct StageConfig {
  StageKind kind = StageKind::kFinetune;
  double base_lr = 0.006;
  int64_t warmup_steps = 4000;
  int64_t max_steps = 1000;
  int64_t batch_tokens = 60000;
  double dropout = 0.1;
  uint64_t seed = 1;
  // Override the model config's auxiliary loss weights when set.
  std::optional<double> w_src;
  std::optional<double> w_tgt;
  PretrainMode pretrain_mode = PretrainMode::kEqualWeights;
  bool spec_augment = true;
  // Prompt stage only: update the prompt table and nothing else.
  bool freeze_non_prompt = false;
  double clip_norm = 1.0;
  // Periodic checkpoints every N steps; 0 keeps only the final one.
  int64_t checkpoint_every = 0;

  // Loss weights of a step. Pretraining ignores the spectrogram decoder.
  model::LossWeights Weights(const model::ModelConfig& model, int64_t step) const;
  bool uses_prompt() const { return kind == StageKind::kPrompt; }
  bool needs_target_audio() const { return kind != StageKind::kPretrain; }

  // Throws ConfigError naming "stage.<key>".
  void Validate(const model::ModelConfig& model) const;

  nlohmann::ordered_json ToJson() const;
  static StageConfig FromJson(const nlohmann::json& j, const StageConfig& base);
  uint64_t Fingerprint() const;

  // Published training values for each named profile.
  static StageConfig Fisher(StageKind kind);
  static StageConfig TedEn2Zh(StageKind kind);
  // Warmup 100, small batches, sized for a single CPU core.
  static StageConfig Toy(StageKind kind);
};

}  // namespace s2st::train

#endif  // S2ST_TRAIN_STAGE_H_
