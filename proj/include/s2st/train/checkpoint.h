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

#ifndef S2ST_TRAIN_CHECKPOINT_H_
#define S2ST_TRAIN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "s2st/model/config.h"
#include "s2st/model/translatotron.h"
#include "s2st/train/optimizer.h"
#include "s2st/train/stage.h"

namespace s2st::train {

struct CheckpointMeta {
  StageKind stage = StageKind::kFinetune;
  int64_t step = 0;
  uint64_t model_fingerprint = 0;
  uint64_t stage_fingerprint = 0;
  uint64_t seed = 0;
};

// File layout: magic "S2STCKPT", u32 version, then sections
// {4-byte tag, u64 length, payload} for CONF (model config JSON), STAG
// (stage config JSON), META, PARM (parameter block) and, when present,
// OPTM (optimizer state), closed by an FNV-1a checksum of everything
// before it. Truncation or corruption raises IntegrityError.
void SaveCheckpoint(const std::filesystem::path& path, const model::Translatotron& model,
                    const StageConfig& stage, const CheckpointMeta& meta,
                    const AdamOptimizer* optimizer);

struct LoadedCheckpoint {
  model::ModelConfig config;
  StageConfig stage;
  CheckpointMeta meta;
  std::string params_block;
  std::string optimizer_block;  // empty when absent
};

LoadedCheckpoint ReadCheckpoint(const std::filesystem::path& path);

// Copies the stored parameters into `model`. FingerprintError unless the
// model's config fingerprint equals the stored one.
void RestoreParameters(const LoadedCheckpoint& ckpt, model::Translatotron& model);

// Builds a model from the stored config and loads its parameters.
std::unique_ptr<model::Translatotron> LoadModel(const std::filesystem::path& path);

}  // namespace s2st::train

#endif  // S2ST_TRAIN_CHECKPOINT_H_
