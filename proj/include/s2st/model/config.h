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

#ifndef S2ST_MODEL_CONFIG_H_
#define S2ST_MODEL_CONFIG_H_

#include <cstdint>
#include <string>

#include "json.hpp"
#include "s2st/nd/tensor.h"

namespace s2st::model {

enum class PromptAttachment {
  kEncoderToken,  // one enc_dim token prepended after subsampling
  kFeatureFrame,  // one 80-dim frame prepended before the convolutions
};

struct ModelConfig {
  // Encoder.
  int enc_layers = 12;
  int enc_dim = 512;
  int enc_heads = 8;
  int ffn_dim = 2048;
  int subsample_channels = 256;

  // Spectrogram decoder.
  int dec_layers = 6;
  int dec_dim = 512;
  int dec_heads = 8;
  int dec_ffn_dim = 2048;
  int prenet_hidden = 256;
  int prenet_bottleneck = 32;
  double prenet_dropout = 0.5;
  int reduction_factor = 4;
  int postnet_layers = 5;
  int postnet_channels = 512;
  int postnet_kernel = 5;

  // Auxiliary phoneme decoders.
  int aux_src_layers = 1;
  int aux_tgt_layers = 1;
  int aux_dim = 64;
  int aux_heads = 4;
  int aux_ffn_dim = 256;
  int tap_src = 6;  // 1-based encoder layer index
  int tap_tgt = 9;
  double w_src = 0.3;
  double w_tgt = 0.3;
  int src_phone_vocab = 64;
  int tgt_phone_vocab = 64;

  int n_mels = 80;
  bool prompt_enabled = false;
  PromptAttachment prompt_attachment = PromptAttachment::kEncoderToken;

  double dropout = 0.1;
  double label_smoothing = 0.1;
  double stop_pos_weight = 5.0;
  nd::Precision precision = nd::Precision::kFloat32;

  // Named presets.
  static ModelConfig Fisher();
  static ModelConfig TedEn2Zh();
  static ModelConfig Toy();
  // 2-layer, dim-16 instance used for end-to-end gradient checks.
  static ModelConfig GradCheck();

  // Throws ConfigError naming the violated rule.
  void Validate() const;

  nlohmann::ordered_json ToJson() const;
  // Unknown keys raise ConfigError; missing keys keep the values of `base`.
  static ModelConfig FromJson(const nlohmann::json& j, const ModelConfig& base);

  // Hash of the canonical JSON form; equal configs give equal fingerprints.
  uint64_t Fingerprint() const;
};

}  // namespace s2st::model

#endif  // S2ST_MODEL_CONFIG_H_
