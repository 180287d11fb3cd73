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

#include "s2st/train/stage.h"

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::train {

std::string_view StageKindName(StageKind k) {
  switch (k) {
    case StageKind::kPretrain: return "pretrain";
    case StageKind::kFinetune: return "finetune";
    case StageKind::kMixed: return "mixed";
    case StageKind::kPrompt: return "prompt";
  }
  return "?";
}

StageKind ParseStageKind(std::string_view s) {
  if (s == "pretrain") return StageKind::kPretrain;
  if (s == "finetune") return StageKind::kFinetune;
  if (s == "mixed") return StageKind::kMixed;
  if (s == "prompt") return StageKind::kPrompt;
  throw ConfigError("stage.kind: unknown stage '" + std::string(s) + "'");
}

model::LossWeights StageConfig::Weights(const model::ModelConfig& model, int64_t step) const {
  if (kind == StageKind::kPretrain) {
    if (pretrain_mode == PretrainMode::kAlternating) {
      return step % 2 == 1 ? model::LossWeights{0.0, 0.0, 1.0, 0.0}
                           : model::LossWeights{0.0, 0.0, 0.0, 1.0};
    }
    return model::LossWeights::Pretrain();
  }
  model::LossWeights w = model::LossWeights::Full(model);
  if (w_src) w.aux_src = *w_src;
  if (w_tgt) w.aux_tgt = *w_tgt;
  return w;
}

void StageConfig::Validate(const model::ModelConfig& model) const {
  const auto bad = [](const std::string& key, const std::string& rule) {
    throw ConfigError("stage." + key + ": " + rule);
  };
  if (!(base_lr > 0)) bad("base_lr", "must be > 0");
  if (warmup_steps < 0) bad("warmup_steps", "must be >= 0");
  if (max_steps < 0) bad("max_steps", "must be >= 0");
  if (batch_tokens < 1) bad("batch_tokens", "must be >= 1");
  if (dropout < 0 || dropout >= 1) bad("dropout", "must lie in [0, 1)");
  if (w_src && *w_src < 0) bad("w_src", "must be >= 0");
  if (w_tgt && *w_tgt < 0) bad("w_tgt", "must be >= 0");
  if (checkpoint_every < 0) bad("checkpoint_every", "must be >= 0");
  if (kind == StageKind::kPrompt && !model.prompt_enabled) {
    bad("kind", "prompt stage requires model.prompt_enabled");
  }
  if (freeze_non_prompt && kind != StageKind::kPrompt) {
    bad("freeze_non_prompt", "only valid for the prompt stage");
  }
}

nlohmann::ordered_json StageConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["kind"] = StageKindName(kind);
  j["base_lr"] = base_lr;
  j["warmup_steps"] = warmup_steps;
  j["max_steps"] = max_steps;
  j["batch_tokens"] = batch_tokens;
  j["dropout"] = dropout;
  j["seed"] = seed;
  j["w_src"] = w_src ? nlohmann::ordered_json(*w_src) : nlohmann::ordered_json(nullptr);
  j["w_tgt"] = w_tgt ? nlohmann::ordered_json(*w_tgt) : nlohmann::ordered_json(nullptr);
  j["pretrain_mode"] = pretrain_mode == PretrainMode::kEqualWeights ? "equal" : "alternating";
  j["spec_augment"] = spec_augment;
  j["freeze_non_prompt"] = freeze_non_prompt;
  j["clip_norm"] = clip_norm;
  j["checkpoint_every"] = checkpoint_every;
  return j;
}

StageConfig StageConfig::FromJson(const nlohmann::json& j, const StageConfig& base) {
  if (!j.is_object()) throw ConfigError("stage: expected an object");
  StageConfig s = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "kind") s.kind = ParseStageKind(value.get<std::string>());
      else if (key == "base_lr") s.base_lr = value.get<double>();
      else if (key == "warmup_steps") s.warmup_steps = value.get<int64_t>();
      else if (key == "max_steps") s.max_steps = value.get<int64_t>();
      else if (key == "batch_tokens") s.batch_tokens = value.get<int64_t>();
      else if (key == "dropout") s.dropout = value.get<double>();
      else if (key == "seed") s.seed = value.get<uint64_t>();
      else if (key == "w_src") s.w_src = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      else if (key == "w_tgt") s.w_tgt = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      else if (key == "pretrain_mode") {
        const std::string m = value.get<std::string>();
        if (m == "equal") s.pretrain_mode = PretrainMode::kEqualWeights;
        else if (m == "alternating") s.pretrain_mode = PretrainMode::kAlternating;
        else throw ConfigError("stage.pretrain_mode: expected equal or alternating");
      }
      else if (key == "spec_augment") s.spec_augment = value.get<bool>();
      else if (key == "freeze_non_prompt") s.freeze_non_prompt = value.get<bool>();
      else if (key == "clip_norm") s.clip_norm = value.get<double>();
      else if (key == "checkpoint_every") s.checkpoint_every = value.get<int64_t>();
      else throw ConfigError("stage." + key + ": unknown key");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("stage." + key + ": " + e.what());
    }
  }
  return s;
}

uint64_t StageConfig::Fingerprint() const { return Fnv1a64(ToJson().dump()); }

StageConfig StageConfig::Fisher(StageKind kind) {
  StageConfig s;
  s.kind = kind;
  s.base_lr = 0.006;
  s.warmup_steps = 4000;
  s.batch_tokens = 60000;
  s.dropout = 0.1;
  s.max_steps = 100000;
  return s;
}

StageConfig StageConfig::TedEn2Zh(StageKind kind) {
  StageConfig s = Fisher(kind);
  s.base_lr = 0.0015;
  s.batch_tokens = 45000;
  return s;
}

StageConfig StageConfig::Toy(StageKind kind) {
  StageConfig s;
  s.kind = kind;
  s.base_lr = 0.003;
  s.warmup_steps = 100;
  s.max_steps = 400;
  s.batch_tokens = 160;
  s.dropout = 0.1;
  return s;
}

}  // namespace s2st::train
