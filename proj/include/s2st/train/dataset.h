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

#ifndef S2ST_TRAIN_DATASET_H_
#define S2ST_TRAIN_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "s2st/audio/cmvn.h"
#include "s2st/audio/waveform.h"
#include "s2st/data/manifest.h"
#include "s2st/model/translatotron.h"
#include "s2st/nd/tensor.h"

namespace s2st::train {

// One prepared utterance held in memory.
struct Example {
  std::string id;
  data::Category category = data::Category::kPrimary;
  audio::MelSpectrogram src;        // raw log-mel
  audio::MelSpectrogram tgt;        // raw log-mel, empty without target audio
  std::vector<int64_t> src_phones;  // without specials
  std::vector<int64_t> tgt_phones;
};

// Reads the mel files and phones of every record. Records lacking features
// (or target features when need_target is set) raise ContractError naming
// the record.
std::vector<Example> LoadExamples(const data::CorpusManifest& manifest, bool need_target);

enum class FeatureSide { kSource, kTarget };

audio::CmvnStats ModelStats(const model::Translatotron& model, FeatureSide side);
bool HasStats(const model::Translatotron& model, FeatureSide side);
void SetModelStats(model::Translatotron& model, FeatureSide side, const audio::CmvnStats& stats);

// Fills the model's source and target statistics from `examples` for each
// side that is not yet initialized and has data.
void InitializeStats(model::Translatotron& model, const std::vector<Example>& examples);

// Normalized (T, 80) source tensor.
nd::Tensor NormalizedSource(const model::Translatotron& model, const audio::MelSpectrogram& mel);

// Normalized target padded with zeros to a multiple of r frames.
nd::Tensor NormalizedTarget(const model::Translatotron& model, const audio::MelSpectrogram& mel);

// Undoes target normalization of a model output.
audio::MelSpectrogram DenormalizeTarget(const model::Translatotron& model,
                                        const std::vector<float>& frames, int64_t num_frames,
                                        int sample_rate, int hop_length);

}  // namespace s2st::train

#endif  // S2ST_TRAIN_DATASET_H_
