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

#include "s2st/train/dataset.h"

#include <cmath>

#include "s2st/audio/mel_io.h"
#include "s2st/common/error.h"

namespace s2st::train {

namespace {

const char* MeanName(FeatureSide s) {
  return s == FeatureSide::kSource ? "norm.src_mean" : "norm.tgt_mean";
}
const char* VarName(FeatureSide s) {
  return s == FeatureSide::kSource ? "norm.src_var" : "norm.tgt_var";
}
int SideIndex(FeatureSide s) { return s == FeatureSide::kSource ? 0 : 1; }

std::vector<double> Normalize(const audio::MelSpectrogram& mel, const audio::CmvnStats& stats,
                              int64_t padded_frames) {
  std::vector<double> out(padded_frames * audio::kNumMels, 0.0);
  for (int64_t t = 0; t < mel.num_frames; ++t) {
    for (int c = 0; c < audio::kNumMels; ++c) {
      out[t * audio::kNumMels + c] = (mel.at(t, c) - stats.mean[c]) / std::sqrt(stats.var[c]);
    }
  }
  return out;
}

}  // namespace

std::vector<Example> LoadExamples(const data::CorpusManifest& manifest, bool need_target) {
  std::vector<Example> out;
  out.reserve(manifest.records.size());
  for (const data::UtteranceRecord& r : manifest.records) {
    if (r.src_mel.empty()) {
      throw ContractError("record '" + r.id + "' has no source features; run prepare first");
    }
    if (need_target && r.tgt_mel.empty()) {
      throw ContractError("record '" + r.id + "' has no target features");
    }
    Example e;
    e.id = r.id;
    e.category = r.category;
    e.src = audio::ReadMel(manifest.Resolve(r.src_mel));
    if (!r.tgt_mel.empty()) e.tgt = audio::ReadMel(manifest.Resolve(r.tgt_mel));
    e.src_phones = r.src_phones;
    e.tgt_phones = r.tgt_phones;
    out.push_back(std::move(e));
  }
  return out;
}

audio::CmvnStats ModelStats(const model::Translatotron& model, FeatureSide side) {
  audio::CmvnStats s;
  const nd::Tensor mean = model.params().Get(MeanName(side));
  const nd::Tensor var = model.params().Get(VarName(side));
  s.mean.assign(mean.data().begin(), mean.data().end());
  s.var.assign(var.data().begin(), var.data().end());
  return s;
}

bool HasStats(const model::Translatotron& model, FeatureSide side) {
  return model.params().Get("norm.initialized").at(SideIndex(side)) != 0.0;
}

void SetModelStats(model::Translatotron& model, FeatureSide side, const audio::CmvnStats& stats) {
  auto mean = nd::Tensor(model.params().Get(MeanName(side))).mutable_leaf_data();
  auto var = nd::Tensor(model.params().Get(VarName(side))).mutable_leaf_data();
  for (int c = 0; c < audio::kNumMels; ++c) {
    if (!(stats.var[c] > 0)) throw InvalidArgumentError("feature statistics: variance <= 0");
    // Stored as float in checkpoints; round now so reloads are exact.
    mean[c] = nd::RoundToFloat(stats.mean[c]);
    var[c] = nd::RoundToFloat(stats.var[c]);
  }
  nd::Tensor(model.params().Get("norm.initialized")).mutable_leaf_data()[SideIndex(side)] = 1.0;
}

void InitializeStats(model::Translatotron& model, const std::vector<Example>& examples) {
  for (const FeatureSide side : {FeatureSide::kSource, FeatureSide::kTarget}) {
    if (HasStats(model, side)) continue;
    audio::CmvnAccumulator acc;
    for (const Example& e : examples) {
      const audio::MelSpectrogram& m = side == FeatureSide::kSource ? e.src : e.tgt;
      if (m.num_frames > 0) acc.Add(m);
    }
    if (acc.frames() > 1) SetModelStats(model, side, acc.Finish());
  }
}

nd::Tensor NormalizedSource(const model::Translatotron& model, const audio::MelSpectrogram& mel) {
  return nd::Tensor::FromData({mel.num_frames, audio::kNumMels},
                              Normalize(mel, ModelStats(model, FeatureSide::kSource),
                                        mel.num_frames));
}

nd::Tensor NormalizedTarget(const model::Translatotron& model, const audio::MelSpectrogram& mel) {
  const int64_t r = model.config().reduction_factor;
  const int64_t padded = (mel.num_frames + r - 1) / r * r;
  return nd::Tensor::FromData({padded, audio::kNumMels},
                              Normalize(mel, ModelStats(model, FeatureSide::kTarget), padded));
}

audio::MelSpectrogram DenormalizeTarget(const model::Translatotron& model,
                                        const std::vector<float>& frames, int64_t num_frames,
                                        int sample_rate, int hop_length) {
  const audio::CmvnStats stats = ModelStats(model, FeatureSide::kTarget);
  audio::MelSpectrogram mel;
  mel.num_frames = num_frames;
  mel.sample_rate = sample_rate;
  mel.hop_length = hop_length;
  mel.origin = audio::MelOrigin::kPredicted;
  mel.data.resize(num_frames * audio::kNumMels);
  for (int64_t t = 0; t < num_frames; ++t) {
    for (int c = 0; c < audio::kNumMels; ++c) {
      const double v = frames[t * audio::kNumMels + c] * std::sqrt(stats.var[c]) + stats.mean[c];
      mel.at(t, c) = static_cast<float>(v);
    }
  }
  return mel;
}

}  // namespace s2st::train
