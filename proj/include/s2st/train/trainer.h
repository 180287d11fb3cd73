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

#ifndef S2ST_TRAIN_TRAINER_H_
#define S2ST_TRAIN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2st/audio/spec_augment.h"
#include "s2st/data/manifest.h"
#include "s2st/model/loss.h"
#include "s2st/model/translatotron.h"
#include "s2st/train/checkpoint.h"
#include "s2st/train/dataset.h"
#include "s2st/train/optimizer.h"
#include "s2st/train/stage.h"

namespace s2st::train {

struct TrainLogEntry {
  int64_t step = 0;
  StageKind stage = StageKind::kFinetune;
  double lr = 0.0;
  model::LossBreakdown loss;
  double grad_norm = 0.0;
  int64_t batch_size = 0;

  nlohmann::ordered_json ToJson() const;
  static TrainLogEntry FromJson(const nlohmann::json& j);
};

std::vector<TrainLogEntry> ReadTrainLog(const std::filesystem::path& path);

// Primary (dataset A) and secondary (dataset B) manifests of a run, already
// prepared and filtered.
struct StageInputs {
  data::CorpusManifest primary;
  data::CorpusManifest secondary;
};

// The manifest a stage trains on: B for pretraining, A for fine-tuning, and
// the upsampled mixture of A and B for mixed and prompt tuning. Throws
// ContractError when the required data is missing.
data::CorpusManifest StageManifest(const StageConfig& stage, const StageInputs& inputs);

// Runs the train steps of one stage. Data order, dropout and SpecAugment
// draws are pure functions of (stage seed, step), so a trainer resumed from
// a checkpoint continues exactly as an uninterrupted one.
class Trainer {
 public:
  Trainer(model::Translatotron& model, StageConfig stage, const data::CorpusManifest& manifest);

  // One optimization step; returns its log entry.
  TrainLogEntry Step();

  int64_t step() const { return step_; }
  const StageConfig& stage() const { return stage_; }
  const AdamOptimizer& optimizer() const { return optimizer_; }
  size_t num_examples() const { return examples_.size(); }

  // Record indices of the batch used at `step` (1-based).
  const std::vector<size_t>& BatchAt(int64_t step);

  void Save(const std::filesystem::path& path) const;
  // Restores parameters, optimizer state and step. Refuses checkpoints from
  // another model or stage config with FingerprintError.
  void Resume(const std::filesystem::path& path);

  audio::SpecAugmentPolicy spec_augment_policy;

 private:
  model::Translatotron& model_;
  StageConfig stage_;
  data::CorpusManifest manifest_;
  std::vector<Example> examples_;
  std::vector<audio::MelSpectrogram> src_norm_;
  std::vector<nd::Tensor> tgt_norm_;
  AdamOptimizer optimizer_;
  int64_t step_ = 0;
  std::vector<std::vector<size_t>> plan_;
  int64_t planned_epochs_ = 0;
};

struct RunStageOptions {
  std::filesystem::path out_dir;
  // Defaults to out_dir/train_log.jsonl.
  std::filesystem::path log_path;
  std::optional<std::filesystem::path> resume_from;
  std::function<void(const TrainLogEntry&)> on_step;
};

struct StageResult {
  std::filesystem::path final_checkpoint;
  std::vector<TrainLogEntry> log;
};

// Trains `model` for stage.max_steps steps on StageManifest(stage, inputs),
// appending one log line per step and writing periodic checkpoints
// (<kind>_step<N>.ckpt) plus <kind>_final.ckpt in out_dir.
StageResult RunStage(model::Translatotron& model, const StageConfig& stage,
                     const StageInputs& inputs, const RunStageOptions& options);

}  // namespace s2st::train

#endif  // S2ST_TRAIN_TRAINER_H_
