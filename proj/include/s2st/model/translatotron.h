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

#ifndef S2ST_MODEL_TRANSLATOTRON_H_
#define S2ST_MODEL_TRANSLATOTRON_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "s2st/model/config.h"
#include "s2st/model/layers.h"
#include "s2st/nd/parameters.h"

namespace s2st::model {

enum class PromptCategory { kPrimary = 0, kSecondary = 1 };
enum class AuxTask { kSource, kTarget };

std::string_view PromptCategoryName(PromptCategory c);

struct EncoderStates {
  std::vector<nd::Tensor> layers;  // enc_layers entries of (T', enc_dim)
  nd::Tensor final;                // layer-normed last state, decoder memory
  bool has_prompt = false;

  int64_t length() const { return layers.empty() ? 0 : layers.front().dim(0); }
};

struct DecoderOutput {
  nd::Tensor mel_before;   // (steps * r, 80)
  nd::Tensor mel_after;    // (steps * r, 80)
  nd::Tensor stop_logits;  // (steps)
  int64_t steps = 0;
};

struct InferenceResult {
  std::vector<float> mel;  // (steps * r) x 80, row-major, post-net output
  int64_t num_frames = 0;
  int64_t steps = 0;
  bool stopped_early = false;
};

// Parameter name prefixes of the model components.
inline constexpr std::string_view kEncoderPrefix = "enc.";
inline constexpr std::string_view kSpecDecoderPrefix = "spec.";
inline constexpr std::string_view kAuxSourcePrefix = "aux_src.";
inline constexpr std::string_view kAuxTargetPrefix = "aux_tgt.";
inline constexpr std::string_view kPromptName = "prompt.table";

class Translatotron {
 public:
  // Builds and initializes every parameter from `seed`. The parameter count
  // and names depend only on the config.
  Translatotron(const ModelConfig& config, uint64_t seed);

  const ModelConfig& config() const { return config_; }
  nd::ParameterSet& params() { return params_; }
  const nd::ParameterSet& params() const { return params_; }

  // (T, 80) -> (ceil(ceil(T/2)/2), enc_dim) before positions are added.
  nd::Tensor ConvSubsample(const nd::Tensor& mel, RunContext& ctx) const;

  // mel: (T, 80) normalized source features.
  EncoderStates Encode(const nd::Tensor& mel, std::optional<PromptCategory> prompt,
                       RunContext& ctx) const;

  // target: (T_tgt, 80) with T_tgt a multiple of the reduction factor.
  DecoderOutput DecodeSpectrogram(const EncoderStates& enc, const nd::Tensor& target,
                                  RunContext& ctx) const;

  // Post-net residual, (T, 80) -> (T, 80).
  nd::Tensor PostNet(const nd::Tensor& mel_before, RunContext& ctx) const;

  // phones starts with BOS; returns (L, vocab) logits.
  nd::Tensor DecodeAuxiliary(const EncoderStates& enc, AuxTask which,
                             std::span<const int64_t> phones, RunContext& ctx) const;

  // Autoregressive spectrogram generation without gradient recording.
  InferenceResult InferSpectrogram(const EncoderStates& enc, double stop_threshold,
                                   int max_steps) const;

  int64_t vocab_size(AuxTask which) const;

 private:
  struct SpecDecoder {
    Linear prenet1, prenet2, in_proj;
    std::vector<DecoderLayer> layers;
    LayerNormParams final_ln;
    Linear mel_proj, stop_proj;
    std::vector<nd::Tensor> postnet_w, postnet_b;
  };
  struct AuxDecoder {
    nd::Tensor embedding;
    LayerNormParams memory_ln;
    std::vector<DecoderLayer> layers;
    LayerNormParams final_ln;
    Linear out;
    int tap = 1;
  };

  nd::Tensor SpecDecoderCore(const EncoderStates& enc, const nd::Tensor& prev_frames,
                             RunContext& ctx, nd::Tensor* stop_logits) const;
  const AuxDecoder& aux(AuxTask which) const {
    return which == AuxTask::kSource ? aux_src_ : aux_tgt_;
  }

  ModelConfig config_;
  nd::ParameterSet params_;

  nd::Tensor sub_w1_, sub_b1_, sub_w2_, sub_b2_;
  Linear sub_proj_;
  std::vector<EncoderLayer> enc_layers_;
  LayerNormParams enc_final_ln_;
  nd::Tensor prompt_table_;  // (2, enc_dim) or (2, 80); undefined when disabled

  SpecDecoder spec_;
  AuxDecoder aux_src_, aux_tgt_;
};

// Copies a (T, 80) float matrix into a tensor.
nd::Tensor MelTensor(std::span<const float> data, int64_t frames);

}  // namespace s2st::model

#endif  // S2ST_MODEL_TRANSLATOTRON_H_
