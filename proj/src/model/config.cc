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

#include "s2st/model/config.h"

#include <string>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::model {

namespace {

std::string AttachmentName(PromptAttachment a) {
  return a == PromptAttachment::kEncoderToken ? "encoder_token" : "feature_frame";
}

PromptAttachment ParseAttachment(const std::string& s) {
  if (s == "encoder_token") return PromptAttachment::kEncoderToken;
  if (s == "feature_frame") return PromptAttachment::kFeatureFrame;
  throw ConfigError("model.prompt_attachment: expected encoder_token or feature_frame, got '" +
                    s + "'");
}

}  // namespace

ModelConfig ModelConfig::Fisher() {
  ModelConfig c;
  c.aux_src_layers = c.aux_tgt_layers = 1;
  c.aux_dim = 64;
  c.tap_src = 6;
  c.tap_tgt = 9;
  return c;
}

ModelConfig ModelConfig::TedEn2Zh() {
  ModelConfig c = Fisher();
  c.aux_src_layers = c.aux_tgt_layers = 4;
  c.tap_src = 4;
  return c;
}

ModelConfig ModelConfig::Toy() {
  ModelConfig c;
  c.enc_layers = 2;
  c.enc_dim = 64;
  c.enc_heads = 4;
  c.ffn_dim = 256;
  c.subsample_channels = 16;
  c.dec_layers = 2;
  c.dec_dim = 64;
  c.dec_heads = 4;
  c.dec_ffn_dim = 256;
  c.prenet_hidden = 256;
  c.prenet_bottleneck = 32;
  c.postnet_channels = 32;
  c.aux_src_layers = c.aux_tgt_layers = 1;
  c.aux_dim = 32;
  c.aux_heads = 4;
  c.aux_ffn_dim = 128;
  c.tap_src = 1;
  c.tap_tgt = 2;
  c.src_phone_vocab = 16;
  c.tgt_phone_vocab = 16;
  return c;
}

ModelConfig ModelConfig::GradCheck() {
  ModelConfig c;
  c.enc_layers = 2;
  c.enc_dim = 16;
  c.enc_heads = 2;
  c.ffn_dim = 32;
  c.subsample_channels = 2;
  c.dec_layers = 2;
  c.dec_dim = 16;
  c.dec_heads = 2;
  c.dec_ffn_dim = 32;
  c.prenet_hidden = 16;
  c.prenet_bottleneck = 8;
  c.postnet_layers = 3;
  c.postnet_channels = 4;
  c.postnet_kernel = 3;
  c.aux_src_layers = c.aux_tgt_layers = 1;
  c.aux_dim = 16;
  c.aux_heads = 2;
  c.aux_ffn_dim = 32;
  c.tap_src = 1;
  c.tap_tgt = 2;
  c.src_phone_vocab = 6;
  c.tgt_phone_vocab = 5;
  c.prompt_enabled = true;
  c.precision = nd::Precision::kFloat64;
  return c;
}

void ModelConfig::Validate() const {
  auto fail = [](const std::string& key, const std::string& rule) {
    throw ConfigError("model." + key + ": " + rule);
  };
  auto positive = [&](const char* key, int v) {
    if (v < 1) fail(key, "must be >= 1, got " + std::to_string(v));
  };
  positive("enc_layers", enc_layers);
  positive("enc_dim", enc_dim);
  positive("enc_heads", enc_heads);
  positive("ffn_dim", ffn_dim);
  positive("subsample_channels", subsample_channels);
  positive("dec_layers", dec_layers);
  positive("dec_dim", dec_dim);
  positive("dec_heads", dec_heads);
  positive("dec_ffn_dim", dec_ffn_dim);
  positive("prenet_hidden", prenet_hidden);
  positive("prenet_bottleneck", prenet_bottleneck);
  positive("reduction_factor", reduction_factor);
  positive("postnet_layers", postnet_layers);
  positive("postnet_channels", postnet_channels);
  positive("postnet_kernel", postnet_kernel);
  positive("aux_src_layers", aux_src_layers);
  positive("aux_tgt_layers", aux_tgt_layers);
  positive("aux_dim", aux_dim);
  positive("aux_heads", aux_heads);
  positive("aux_ffn_dim", aux_ffn_dim);
  if (enc_dim % enc_heads != 0) fail("enc_dim", "must be divisible by enc_heads");
  if (dec_dim % dec_heads != 0) fail("dec_dim", "must be divisible by dec_heads");
  if (aux_dim % aux_heads != 0) fail("aux_dim", "must be divisible by aux_heads");
  if (enc_dim % 2 != 0 || dec_dim % 2 != 0 || aux_dim % 2 != 0) {
    fail("enc_dim", "model dims must be even for sinusoidal positions");
  }
  if (tap_src < 1 || tap_src > tap_tgt || tap_tgt > enc_layers) {
    fail("tap_src", "need 1 <= tap_src <= tap_tgt <= enc_layers, got " +
                        std::to_string(tap_src) + ", " + std::to_string(tap_tgt) + ", " +
                        std::to_string(enc_layers));
  }
  if (w_src < 0.0) fail("w_src", "must be >= 0");
  if (w_tgt < 0.0) fail("w_tgt", "must be >= 0");
  if (n_mels != 80) fail("n_mels", "must be 80");
  if (src_phone_vocab < 3) fail("src_phone_vocab", "must be >= 3 (the special symbols)");
  if (tgt_phone_vocab < 3) fail("tgt_phone_vocab", "must be >= 3 (the special symbols)");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout", "must be in [0, 1)");
  if (prenet_dropout < 0.0 || prenet_dropout >= 1.0) fail("prenet_dropout", "must be in [0, 1)");
  if (label_smoothing < 0.0 || label_smoothing >= 1.0) fail("label_smoothing", "must be in [0, 1)");
  if (stop_pos_weight <= 0.0) fail("stop_pos_weight", "must be > 0");
}

nlohmann::ordered_json ModelConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["enc_layers"] = enc_layers;
  j["enc_dim"] = enc_dim;
  j["enc_heads"] = enc_heads;
  j["ffn_dim"] = ffn_dim;
  j["subsample_channels"] = subsample_channels;
  j["dec_layers"] = dec_layers;
  j["dec_dim"] = dec_dim;
  j["dec_heads"] = dec_heads;
  j["dec_ffn_dim"] = dec_ffn_dim;
  j["prenet_hidden"] = prenet_hidden;
  j["prenet_bottleneck"] = prenet_bottleneck;
  j["prenet_dropout"] = prenet_dropout;
  j["reduction_factor"] = reduction_factor;
  j["postnet_layers"] = postnet_layers;
  j["postnet_channels"] = postnet_channels;
  j["postnet_kernel"] = postnet_kernel;
  j["aux_src_layers"] = aux_src_layers;
  j["aux_tgt_layers"] = aux_tgt_layers;
  j["aux_dim"] = aux_dim;
  j["aux_heads"] = aux_heads;
  j["aux_ffn_dim"] = aux_ffn_dim;
  j["tap_src"] = tap_src;
  j["tap_tgt"] = tap_tgt;
  j["w_src"] = w_src;
  j["w_tgt"] = w_tgt;
  j["src_phone_vocab"] = src_phone_vocab;
  j["tgt_phone_vocab"] = tgt_phone_vocab;
  j["n_mels"] = n_mels;
  j["prompt_enabled"] = prompt_enabled;
  j["prompt_attachment"] = AttachmentName(prompt_attachment);
  j["dropout"] = dropout;
  j["label_smoothing"] = label_smoothing;
  j["stop_pos_weight"] = stop_pos_weight;
  j["precision"] = precision == nd::Precision::kFloat32 ? "float32" : "float64";
  return j;
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j, const ModelConfig& base) {
  if (!j.is_object()) throw ConfigError("model: expected an object");
  ModelConfig c = base;
  const nlohmann::ordered_json known = base.ToJson();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) throw ConfigError("model." + it.key() + ": unknown key");
  }
  auto get_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw ConfigError(std::string("model.") + key + ": expected integer");
    out = j[key].get<int>();
  };
  auto get_double = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(std::string("model.") + key + ": expected number");
    out = j[key].get<double>();
  };
  get_int("enc_layers", c.enc_layers);
  get_int("enc_dim", c.enc_dim);
  get_int("enc_heads", c.enc_heads);
  get_int("ffn_dim", c.ffn_dim);
  get_int("subsample_channels", c.subsample_channels);
  get_int("dec_layers", c.dec_layers);
  get_int("dec_dim", c.dec_dim);
  get_int("dec_heads", c.dec_heads);
  get_int("dec_ffn_dim", c.dec_ffn_dim);
  get_int("prenet_hidden", c.prenet_hidden);
  get_int("prenet_bottleneck", c.prenet_bottleneck);
  get_double("prenet_dropout", c.prenet_dropout);
  get_int("reduction_factor", c.reduction_factor);
  get_int("postnet_layers", c.postnet_layers);
  get_int("postnet_channels", c.postnet_channels);
  get_int("postnet_kernel", c.postnet_kernel);
  get_int("aux_src_layers", c.aux_src_layers);
  get_int("aux_tgt_layers", c.aux_tgt_layers);
  get_int("aux_dim", c.aux_dim);
  get_int("aux_heads", c.aux_heads);
  get_int("aux_ffn_dim", c.aux_ffn_dim);
  get_int("tap_src", c.tap_src);
  get_int("tap_tgt", c.tap_tgt);
  get_double("w_src", c.w_src);
  get_double("w_tgt", c.w_tgt);
  get_int("src_phone_vocab", c.src_phone_vocab);
  get_int("tgt_phone_vocab", c.tgt_phone_vocab);
  get_int("n_mels", c.n_mels);
  if (j.contains("prompt_enabled")) {
    if (!j["prompt_enabled"].is_boolean()) throw ConfigError("model.prompt_enabled: expected boolean");
    c.prompt_enabled = j["prompt_enabled"].get<bool>();
  }
  if (j.contains("prompt_attachment")) {
    if (!j["prompt_attachment"].is_string()) {
      throw ConfigError("model.prompt_attachment: expected string");
    }
    c.prompt_attachment = ParseAttachment(j["prompt_attachment"].get<std::string>());
  }
  get_double("dropout", c.dropout);
  get_double("label_smoothing", c.label_smoothing);
  get_double("stop_pos_weight", c.stop_pos_weight);
  if (j.contains("precision")) {
    const std::string p = j["precision"].is_string() ? j["precision"].get<std::string>() : "";
    if (p == "float32") {
      c.precision = nd::Precision::kFloat32;
    } else if (p == "float64") {
      c.precision = nd::Precision::kFloat64;
    } else {
      throw ConfigError("model.precision: expected float32 or float64");
    }
  }
  c.Validate();
  return c;
}

uint64_t ModelConfig::Fingerprint() const { return Fnv1a64(ToJson().dump()); }

}  // namespace s2st::model
