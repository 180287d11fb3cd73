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

#include "s2st/train/trainer.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/common/phones.h"
#include "s2st/common/random.h"
#include "s2st/data/batching.h"
#include "s2st/data/pipeline.h"
#include "s2st/nd/autograd.h"
#include "s2st/train/schedule.h"

namespace s2st::train {

namespace {

// Stream tags for DeriveSeed.
constexpr uint64_t kTagShuffle = 1;
constexpr uint64_t kTagDropout = 2;
constexpr uint64_t kTagAugment = 3;
constexpr uint64_t kTagMix = 4;

std::optional<model::PromptCategory> PromptFor(const StageConfig& stage, data::Category c) {
  if (!stage.uses_prompt()) return std::nullopt;
  return c == data::Category::kPrimary ? model::PromptCategory::kPrimary
                                       : model::PromptCategory::kSecondary;
}

}  // namespace

nlohmann::ordered_json TrainLogEntry::ToJson() const {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["stage"] = StageKindName(stage);
  j["lr"] = lr;
  j["spec_loss"] = loss.spec_loss;
  j["stop_loss"] = loss.stop_loss;
  j["aux_src"] = loss.aux_src_loss;
  j["aux_tgt"] = loss.aux_tgt_loss;
  j["total"] = loss.total;
  j["grad_norm"] = grad_norm;
  j["batch_size"] = batch_size;
  return j;
}

TrainLogEntry TrainLogEntry::FromJson(const nlohmann::json& j) {
  TrainLogEntry e;
  e.step = j.at("step").get<int64_t>();
  e.stage = ParseStageKind(j.at("stage").get<std::string>());
  e.lr = j.at("lr").get<double>();
  e.loss.spec_loss = j.at("spec_loss").get<double>();
  e.loss.stop_loss = j.at("stop_loss").get<double>();
  e.loss.aux_src_loss = j.at("aux_src").get<double>();
  e.loss.aux_tgt_loss = j.at("aux_tgt").get<double>();
  e.loss.total = j.at("total").get<double>();
  e.grad_norm = j.value("grad_norm", 0.0);
  e.batch_size = j.value("batch_size", int64_t{0});
  return e;
}

std::vector<TrainLogEntry> ReadTrainLog(const std::filesystem::path& path) {
  std::vector<TrainLogEntry> out;
  if (!std::filesystem::exists(path)) return out;
  std::istringstream in(ReadFileBytes(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(TrainLogEntry::FromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

data::CorpusManifest StageManifest(const StageConfig& stage, const StageInputs& inputs) {
  switch (stage.kind) {
    case StageKind::kPretrain:
      if (inputs.secondary.records.empty()) {
        throw ContractError("pretrain stage needs a non-empty secondary manifest");
      }
      return inputs.secondary;
    case StageKind::kFinetune:
      if (inputs.primary.records.empty()) {
        throw ContractError("finetune stage needs a non-empty primary manifest");
      }
      return inputs.primary;
    case StageKind::kMixed:
    case StageKind::kPrompt:
      if (inputs.primary.records.empty() || inputs.secondary.records.empty()) {
        throw ContractError(std::string(StageKindName(stage.kind)) +
                            " stage needs primary and secondary manifests");
      }
      return data::MixUpsample(inputs.primary, inputs.secondary,
                               DeriveSeed(stage.seed, {kTagMix}));
  }
  throw ContractError("unknown stage kind");
}

Trainer::Trainer(model::Translatotron& model, StageConfig stage,
                 const data::CorpusManifest& manifest)
    : model_(model),
      stage_(std::move(stage)),
      manifest_(manifest),
      optimizer_(model.params(), AdamConfig{0.9, 0.98, 1e-9, stage_.clip_norm}) {
  stage_.Validate(model_.config());
  if (manifest_.records.empty()) throw ContractError("trainer: empty manifest");
  examples_ = LoadExamples(manifest_, stage_.needs_target_audio());
  InitializeStats(model_, examples_);
  const int64_t src_vocab = model_.vocab_size(model::AuxTask::kSource);
  const int64_t tgt_vocab = model_.vocab_size(model::AuxTask::kTarget);
  for (const Example& e : examples_) {
    for (int64_t p : e.src_phones) {
      if (p < kNumSpecialPhones || p >= src_vocab) {
        throw VocabError("record '" + e.id + "': source phone id " + std::to_string(p) +
                         " outside the model vocabulary");
      }
    }
    for (int64_t p : e.tgt_phones) {
      if (p < kNumSpecialPhones || p >= tgt_vocab) {
        throw VocabError("record '" + e.id + "': target phone id " + std::to_string(p) +
                         " outside the model vocabulary");
      }
    }
    const nd::Tensor src = NormalizedSource(model_, e.src);
    audio::MelSpectrogram m = e.src;
    for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = static_cast<float>(src.at(i));
    src_norm_.push_back(std::move(m));
    tgt_norm_.push_back(e.tgt.num_frames > 0 ? NormalizedTarget(model_, e.tgt) : nd::Tensor());
  }
  spec_augment_policy = audio::SpecAugmentPolicy();
}

const std::vector<size_t>& Trainer::BatchAt(int64_t step) {
  if (step < 1) throw ContractError("trainer: batch step must be >= 1");
  while (static_cast<int64_t>(plan_.size()) < step) {
    const uint64_t epoch = static_cast<uint64_t>(planned_epochs_++);
    std::vector<size_t> order(examples_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(DeriveSeed(stage_.seed, {static_cast<uint64_t>(stage_.kind), kTagShuffle, epoch}));
    rng.Shuffle(order);
    data::CorpusManifest shuffled;
    shuffled.role = manifest_.role;
    for (size_t i : order) shuffled.records.push_back(manifest_.records[i]);
    for (const data::Batch& b : data::BatchByTokens(shuffled, stage_.batch_tokens, false)) {
      std::vector<size_t> ids;
      for (size_t k : b.indices) ids.push_back(order[k]);
      plan_.push_back(std::move(ids));
    }
  }
  return plan_[step - 1];
}

TrainLogEntry Trainer::Step() {
  const int64_t step = step_ + 1;
  const std::vector<size_t> batch = BatchAt(step);
  const model::ModelConfig& cfg = model_.config();
  const model::LossWeights weights = stage_.Weights(cfg, step);
  const bool want_spec = weights.spec > 0 || weights.stop > 0;
  Rng dropout_rng(DeriveSeed(stage_.seed, {static_cast<uint64_t>(stage_.kind), kTagDropout,
                                           static_cast<uint64_t>(step)}));
  model::RunContext ctx;
  ctx.training = true;
  ctx.rng = &dropout_rng;
  ctx.dropout = stage_.dropout;
  ctx.prenet_dropout = cfg.prenet_dropout;

  const auto batch_ids = [&] {
    std::string ids;
    for (size_t i : batch) ids += (ids.empty() ? "" : ",") + examples_[i].id;
    return ids;
  };

  model::LossAccumulator acc(cfg.label_smoothing, cfg.stop_pos_weight);
  model::LossAccumulator::Result result;
  nd::GradientMap grads;
  try {
    for (size_t i : batch) {
      const Example& e = examples_[i];
      audio::MelSpectrogram src = src_norm_[i];
      if (stage_.spec_augment) {
        src = audio::SpecAugment(src, spec_augment_policy,
                                 DeriveSeed(stage_.seed, {static_cast<uint64_t>(stage_.kind),
                                                          kTagAugment,
                                                          static_cast<uint64_t>(step), i}));
      }
      const model::EncoderStates enc =
          model_.Encode(model::MelTensor(src.data, src.num_frames),
                        PromptFor(stage_, e.category), ctx);
      if (want_spec) {
        const nd::Tensor& target = tgt_norm_[i];
        const model::DecoderOutput out = model_.DecodeSpectrogram(enc, target, ctx);
        acc.AddSpectrogram(out, target, e.tgt.num_frames, cfg.reduction_factor);
      }
      std::vector<int64_t> inputs, targets;
      if (weights.aux_src > 0 && !e.src_phones.empty()) {
        model::MakeAuxSequences(e.src_phones, &inputs, &targets);
        acc.AddAuxiliary(model::AuxTask::kSource,
                         model_.DecodeAuxiliary(enc, model::AuxTask::kSource, inputs, ctx),
                         targets);
      }
      if (weights.aux_tgt > 0 && !e.tgt_phones.empty()) {
        model::MakeAuxSequences(e.tgt_phones, &inputs, &targets);
        acc.AddAuxiliary(model::AuxTask::kTarget,
                         model_.DecodeAuxiliary(enc, model::AuxTask::kTarget, inputs, ctx),
                         targets);
      }
    }
    result = acc.Finish(weights);
    if (!std::isfinite(result.breakdown.total)) {
      throw NumericError("non-finite loss " + std::to_string(result.breakdown.total));
    }
    grads = nd::Backward(result.total);
  } catch (const NumericError& e) {
    throw NumericError(std::string(StageKindName(stage_.kind)) + " step " +
                       std::to_string(step) + ": " + e.what() + " [batch: " + batch_ids() + "]");
  }

  const double lr = LrAtStep(step, stage_.base_lr, stage_.warmup_steps);
  std::function<bool(const std::string&)> filter;
  if (stage_.freeze_non_prompt) {
    filter = [](const std::string& name) { return name == model::kPromptName; };
  }
  const AdamOptimizer::StepInfo info =
      optimizer_.Step(model_.params(), grads, lr, cfg.precision, filter);
  step_ = step;

  TrainLogEntry entry;
  entry.step = step;
  entry.stage = stage_.kind;
  entry.lr = lr;
  entry.loss = result.breakdown;
  entry.grad_norm = info.grad_norm;
  entry.batch_size = static_cast<int64_t>(batch.size());
  return entry;
}

void Trainer::Save(const std::filesystem::path& path) const {
  CheckpointMeta meta;
  meta.stage = stage_.kind;
  meta.step = step_;
  meta.model_fingerprint = model_.config().Fingerprint();
  meta.stage_fingerprint = stage_.Fingerprint();
  meta.seed = stage_.seed;
  SaveCheckpoint(path, model_, stage_, meta, &optimizer_);
}

void Trainer::Resume(const std::filesystem::path& path) {
  const LoadedCheckpoint ck = ReadCheckpoint(path);
  if (ck.meta.stage_fingerprint != stage_.Fingerprint() || ck.meta.stage != stage_.kind) {
    throw FingerprintError("cannot resume: checkpoint " + path.string() +
                           " was written by a different stage configuration");
  }
  if (ck.optimizer_block.empty()) {
    throw IntegrityError("cannot resume: checkpoint " + path.string() + " has no optimizer state");
  }
  RestoreParameters(ck, model_);
  ByteReader in(ck.optimizer_block, path.string());
  optimizer_.DeserializeFrom(in);
  step_ = ck.meta.step;
}

StageResult RunStage(model::Translatotron& model, const StageConfig& stage,
                     const StageInputs& inputs, const RunStageOptions& options) {
  namespace fs = std::filesystem;
  if (options.out_dir.empty()) throw ConfigError("run_stage: out_dir is empty");
  fs::create_directories(options.out_dir);
  const fs::path log_path =
      options.log_path.empty() ? options.out_dir / "train_log.jsonl" : options.log_path;
  Trainer trainer(model, stage, StageManifest(stage, inputs));
  StageResult result;
  const std::string kind(StageKindName(stage.kind));
  if (options.resume_from) {
    trainer.Resume(*options.resume_from);
    // Keep the log consistent with the checkpoint: entries past its step
    // were never part of this trajectory.
    std::string kept;
    for (const TrainLogEntry& e : ReadTrainLog(log_path)) {
      if (e.stage == stage.kind && e.step <= trainer.step()) {
        kept += e.ToJson().dump() + "\n";
        result.log.push_back(e);
      } else if (e.stage != stage.kind) {
        kept += e.ToJson().dump() + "\n";
      }
    }
    WriteFileBytes(log_path, kept);
  }
  std::ofstream log(log_path, std::ios::app | std::ios::binary);
  if (!log) throw IoError("cannot open training log " + log_path.string());
  while (trainer.step() < stage.max_steps) {
    const TrainLogEntry entry = trainer.Step();
    log << entry.ToJson().dump() << "\n";
    log.flush();
    result.log.push_back(entry);
    if (options.on_step) options.on_step(entry);
    if (stage.checkpoint_every > 0 && entry.step % stage.checkpoint_every == 0 &&
        entry.step < stage.max_steps) {
      trainer.Save(options.out_dir / (kind + "_step" + std::to_string(entry.step) + ".ckpt"));
    }
  }
  result.final_checkpoint = options.out_dir / (kind + "_final.ckpt");
  trainer.Save(result.final_checkpoint);
  return result;
}

}  // namespace s2st::train
