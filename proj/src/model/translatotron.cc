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

#include "s2st/model/translatotron.h"

#include <array>
#include <cmath>
#include <string>

#include "s2st/common/error.h"
#include "s2st/common/phones.h"

namespace s2st::model {

using nd::AttentionMask;
using nd::Init;
using nd::Tensor;

std::string_view PromptCategoryName(PromptCategory c) {
  return c == PromptCategory::kPrimary ? "primary" : "secondary";
}

Tensor MelTensor(std::span<const float> data, int64_t frames) {
  if (static_cast<int64_t>(data.size()) != frames * 80) {
    throw ShapeError("mel tensor: " + std::to_string(data.size()) + " values for " +
                     std::to_string(frames) + " frames of 80");
  }
  return Tensor::FromData({frames, 80}, std::vector<double>(data.begin(), data.end()));
}

Translatotron::Translatotron(const ModelConfig& config, uint64_t seed) : config_(config) {
  config_.Validate();
  const ModelConfig& c = config_;
  Rng rng(seed);
  const int64_t ch = c.subsample_channels;

  // Encoder.
  sub_w1_ = params_.Create("enc.sub.conv1.w", {ch, 1, 3, 3}, Init::kXavierUniform, rng);
  sub_b1_ = params_.Create("enc.sub.conv1.b", {ch}, Init::kZeros, rng);
  sub_w2_ = params_.Create("enc.sub.conv2.w", {ch, ch, 3, 3}, Init::kXavierUniform, rng);
  sub_b2_ = params_.Create("enc.sub.conv2.b", {ch}, Init::kZeros, rng);
  const int64_t sub_width = nd::ConvOutputExtent(
      nd::ConvOutputExtent(c.n_mels, 3, 2, nd::Padding::kSame), 3, 2, nd::Padding::kSame);
  sub_proj_ = Linear::Create(params_, "enc.sub.proj", ch * sub_width, c.enc_dim, rng);
  for (int i = 0; i < c.enc_layers; ++i) {
    enc_layers_.push_back(EncoderLayer::Create(params_, "enc.layer" + std::to_string(i + 1),
                                               c.enc_dim, c.enc_heads, c.ffn_dim, rng));
  }
  enc_final_ln_ = LayerNormParams::Create(params_, "enc.final_ln", c.enc_dim, rng);
  if (c.prompt_enabled) {
    const int64_t width = c.prompt_attachment == PromptAttachment::kEncoderToken ? c.enc_dim : 80;
    // Unit variance so the two categories are distinguishable from the start.
    prompt_table_ = params_.Create(std::string(kPromptName), {2, width}, Init::kNormal, rng, 1.0);
  }

  // Spectrogram decoder.
  const int64_t group = static_cast<int64_t>(c.reduction_factor) * c.n_mels;
  spec_.prenet1 = Linear::Create(params_, "spec.prenet1", group, c.prenet_hidden, rng);
  spec_.prenet2 = Linear::Create(params_, "spec.prenet2", c.prenet_hidden, c.prenet_bottleneck, rng);
  spec_.in_proj = Linear::Create(params_, "spec.in_proj", c.prenet_bottleneck, c.dec_dim, rng);
  for (int i = 0; i < c.dec_layers; ++i) {
    spec_.layers.push_back(DecoderLayer::Create(params_, "spec.layer" + std::to_string(i + 1),
                                                c.dec_dim, c.enc_dim, c.dec_heads,
                                                c.dec_ffn_dim, rng));
  }
  spec_.final_ln = LayerNormParams::Create(params_, "spec.final_ln", c.dec_dim, rng);
  spec_.mel_proj = Linear::Create(params_, "spec.mel_proj", c.dec_dim, group, rng);
  spec_.stop_proj = Linear::Create(params_, "spec.stop_proj", c.dec_dim, 1, rng);
  for (int i = 0; i < c.postnet_layers; ++i) {
    const int64_t cin = i == 0 ? c.n_mels : c.postnet_channels;
    const int64_t cout = i + 1 == c.postnet_layers ? c.n_mels : c.postnet_channels;
    const std::string name = "spec.postnet" + std::to_string(i + 1);
    spec_.postnet_w.push_back(
        params_.Create(name + ".w", {cout, cin, 1, c.postnet_kernel}, Init::kXavierUniform, rng));
    spec_.postnet_b.push_back(params_.Create(name + ".b", {cout}, Init::kZeros, rng));
  }

  // Auxiliary decoders.
  auto build_aux = [&](AuxDecoder& d, const std::string& prefix, int layers, int vocab, int tap) {
    d.tap = tap;
    d.embedding = params_.Create(prefix + "embedding", {vocab, c.aux_dim}, Init::kNormal, rng,
                                 1.0 / std::sqrt(static_cast<double>(c.aux_dim)));
    d.memory_ln = LayerNormParams::Create(params_, prefix + "memory_ln", c.enc_dim, rng);
    for (int i = 0; i < layers; ++i) {
      d.layers.push_back(DecoderLayer::Create(params_, prefix + "layer" + std::to_string(i + 1),
                                              c.aux_dim, c.enc_dim, c.aux_heads, c.aux_ffn_dim,
                                              rng));
    }
    d.final_ln = LayerNormParams::Create(params_, prefix + "final_ln", c.aux_dim, rng);
    d.out = Linear::Create(params_, prefix + "out", c.aux_dim, vocab, rng);
  };
  build_aux(aux_src_, std::string(kAuxSourcePrefix), c.aux_src_layers, c.src_phone_vocab,
            c.tap_src);
  build_aux(aux_tgt_, std::string(kAuxTargetPrefix), c.aux_tgt_layers, c.tgt_phone_vocab,
            c.tap_tgt);

  // Feature statistics, filled in from training data.
  params_.CreateBuffer("norm.src_mean", {80}, 0.0);
  params_.CreateBuffer("norm.src_var", {80}, 1.0);
  params_.CreateBuffer("norm.tgt_mean", {80}, 0.0);
  params_.CreateBuffer("norm.tgt_var", {80}, 1.0);
  // Set to 1 once source (entry 0) or target (entry 1) statistics are filled.
  params_.CreateBuffer("norm.initialized", {2}, 0.0);

  params_.RoundTo(c.precision);
}

int64_t Translatotron::vocab_size(AuxTask which) const {
  return which == AuxTask::kSource ? config_.src_phone_vocab : config_.tgt_phone_vocab;
}

Tensor Translatotron::ConvSubsample(const Tensor& mel, RunContext& ctx) const {
  if (mel.rank() != 2 || mel.dim(1) != 80) {
    throw ShapeError("conv_subsample: expected (T, 80), got " + nd::ShapeToString(mel.shape()));
  }
  if (mel.dim(0) == 0) throw InvalidArgumentError("conv_subsample: empty input (T = 0)");
  const nd::Conv2dOptions stride2{2, 2, nd::Padding::kSame};
  Tensor x = nd::Reshape(mel, {1, mel.dim(0), 80});
  x = nd::Relu(nd::Conv2d(x, sub_w1_, sub_b1_, stride2));
  x = nd::Relu(nd::Conv2d(x, sub_w2_, sub_b2_, stride2));
  const int64_t channels = x.dim(0), frames = x.dim(1), width = x.dim(2);
  const std::array<int64_t, 3> perm = {1, 0, 2};
  x = nd::Reshape(nd::Permute(x, perm), {frames, channels * width});
  return ApplyDropout(sub_proj_(x), ctx.dropout, ctx);
}

EncoderStates Translatotron::Encode(const Tensor& mel, std::optional<PromptCategory> prompt,
                                    RunContext& ctx) const {
  if (prompt.has_value() && !config_.prompt_enabled) {
    throw ConfigError("encode: a prompt was given but prompt_enabled is false");
  }
  const std::array<int64_t, 1> prompt_row = {static_cast<int64_t>(prompt.value_or(PromptCategory::kPrimary))};
  Tensor features;
  if (prompt.has_value() && config_.prompt_attachment == PromptAttachment::kFeatureFrame) {
    const std::array<Tensor, 2> parts = {nd::EmbeddingLookup(prompt_table_, prompt_row), mel};
    features = ConvSubsample(nd::Concat(parts, 0), ctx);
  } else {
    features = ConvSubsample(mel, ctx);
    if (prompt.has_value()) {
      const std::array<Tensor, 2> parts = {nd::EmbeddingLookup(prompt_table_, prompt_row),
                                           features};
      features = nd::Concat(parts, 0);
    }
  }
  const int64_t length = features.dim(0);
  Tensor x = nd::Add(features, nd::SinusoidalPositions(length, config_.enc_dim));
  const AttentionMask mask = AttentionMask::All(1, length);
  EncoderStates states;
  states.has_prompt = prompt.has_value();
  for (const EncoderLayer& layer : enc_layers_) {
    x = layer(x, mask, ctx);
    states.layers.push_back(x);
  }
  states.final = enc_final_ln_(x);
  return states;
}

Tensor Translatotron::SpecDecoderCore(const EncoderStates& enc, const Tensor& prev_frames,
                                      RunContext& ctx, Tensor* stop_logits) const {
  const int64_t steps = prev_frames.dim(0);
  Tensor x = ApplyDropout(nd::Relu(spec_.prenet1(prev_frames)), ctx.prenet_dropout, ctx);
  x = ApplyDropout(nd::Relu(spec_.prenet2(x)), ctx.prenet_dropout, ctx);
  x = nd::Add(spec_.in_proj(x), nd::SinusoidalPositions(steps, config_.dec_dim));
  x = ApplyDropout(x, ctx.dropout, ctx);
  for (const DecoderLayer& layer : spec_.layers) x = layer(x, enc.final, ctx);
  x = spec_.final_ln(x);
  *stop_logits = nd::Reshape(spec_.stop_proj(x), {steps});
  return nd::Reshape(spec_.mel_proj(x), {steps * config_.reduction_factor, config_.n_mels});
}

Tensor Translatotron::PostNet(const Tensor& mel_before, RunContext& ctx) const {
  const int64_t frames = mel_before.dim(0);
  Tensor x = nd::Reshape(nd::Transpose(mel_before), {config_.n_mels, 1, frames});
  const nd::Conv2dOptions same{1, 1, nd::Padding::kSame};
  const size_t n = spec_.postnet_w.size();
  for (size_t i = 0; i < n; ++i) {
    x = nd::Conv2d(x, spec_.postnet_w[i], spec_.postnet_b[i], same);
    if (i + 1 < n) x = ApplyDropout(nd::Tanh(x), ctx.dropout, ctx);
  }
  return nd::Transpose(nd::Reshape(x, {config_.n_mels, frames}));
}

DecoderOutput Translatotron::DecodeSpectrogram(const EncoderStates& enc, const Tensor& target,
                                               RunContext& ctx) const {
  const int64_t r = config_.reduction_factor;
  if (target.rank() != 2 || target.dim(1) != 80) {
    throw ShapeError("decode_spectrogram: expected (T, 80) target, got " +
                     nd::ShapeToString(target.shape()));
  }
  const int64_t frames = target.dim(0);
  if (frames == 0 || frames % r != 0) {
    throw ContractError("decode_spectrogram: target length " + std::to_string(frames) +
                        " is not a positive multiple of the reduction factor " +
                        std::to_string(r) + "; pad the target and flag the pad frames");
  }
  const int64_t steps = frames / r;
  const Tensor grouped = nd::Reshape(target, {steps, r * 80});
  const std::array<Tensor, 2> parts = {Tensor::Zeros({1, r * 80}),
                                       nd::Slice(grouped, 0, 0, steps - 1)};
  const Tensor prev = steps > 1 ? nd::Concat(parts, 0) : Tensor::Zeros({1, r * 80});
  DecoderOutput out;
  out.steps = steps;
  out.mel_before = SpecDecoderCore(enc, prev, ctx, &out.stop_logits);
  out.mel_after = nd::Add(out.mel_before, PostNet(out.mel_before, ctx));
  return out;
}

Tensor Translatotron::DecodeAuxiliary(const EncoderStates& enc, AuxTask which,
                                      std::span<const int64_t> phones, RunContext& ctx) const {
  const AuxDecoder& d = aux(which);
  if (phones.empty()) throw ContractError("decode_auxiliary: phone sequence is empty");
  if (phones.front() != kBosId) throw ContractError("decode_auxiliary: phones must begin with BOS");
  if (static_cast<int64_t>(enc.layers.size()) < d.tap) {
    throw ContractError("decode_auxiliary: encoder has fewer layers than the tap");
  }
  const Tensor memory = d.memory_ln(enc.layers[d.tap - 1]);
  const int64_t length = static_cast<int64_t>(phones.size());
  Tensor x = nd::EmbeddingLookup(d.embedding, phones);
  x = ApplyDropout(nd::Add(x, nd::SinusoidalPositions(length, config_.aux_dim)), ctx.dropout, ctx);
  for (const DecoderLayer& layer : d.layers) x = layer(x, memory, ctx);
  return d.out(d.final_ln(x));
}

InferenceResult Translatotron::InferSpectrogram(const EncoderStates& enc, double stop_threshold,
                                                int max_steps) const {
  if (max_steps < 1) throw InvalidArgumentError("infer_spectrogram: max_steps must be >= 1");
  nd::NoGradGuard no_grad;
  RunContext ctx = RunContext::Inference();
  const int64_t r = config_.reduction_factor;
  const int64_t group = r * 80;
  std::vector<double> prev(group, 0.0);  // step inputs, one row per step
  InferenceResult result;
  Tensor mel_before;
  for (int step = 0; step < max_steps; ++step) {
    const int64_t steps = step + 1;
    Tensor stop;
    mel_before = SpecDecoderCore(enc, Tensor::FromData({steps, group}, prev), ctx, &stop);
    result.steps = steps;
    const double p = 1.0 / (1.0 + std::exp(-stop.at(step)));
    if (p > stop_threshold) {
      result.stopped_early = true;
      break;
    }
    // Next input is the last group of predicted frames.
    const auto last = mel_before.data().subspan(step * group, group);
    prev.insert(prev.end(), last.begin(), last.end());
  }
  const Tensor mel_after = nd::Add(mel_before, PostNet(mel_before, ctx));
  result.num_frames = mel_after.dim(0);
  result.mel.assign(mel_after.values().begin(), mel_after.values().end());
  for (float& v : result.mel) {
    if (!std::isfinite(v)) throw NumericError("infer_spectrogram: non-finite output frame");
  }
  return result;
}

}  // namespace s2st::model
