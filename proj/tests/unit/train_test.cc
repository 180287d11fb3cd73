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

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/data/toy_dataset.h"
#include "s2st/model/translatotron.h"
#include "s2st/train/checkpoint.h"
#include "s2st/train/dataset.h"
#include "s2st/train/optimizer.h"
#include "s2st/train/schedule.h"
#include "s2st/train/stage.h"
#include "s2st/train/trainer.h"

using namespace s2st;
using namespace s2st::train;
namespace fs = std::filesystem;

namespace {

// Reduced toy model so that each step costs a few milliseconds.
model::ModelConfig TinyConfig(bool prompt = true) {
  model::ModelConfig c = model::ModelConfig::Toy();
  c.enc_dim = c.dec_dim = 32;
  c.enc_heads = c.dec_heads = 2;
  c.ffn_dim = c.dec_ffn_dim = 64;
  c.subsample_channels = 8;
  c.prenet_hidden = 32;
  c.postnet_layers = 2;
  c.postnet_channels = 16;
  c.aux_dim = 16;
  c.aux_heads = 2;
  c.aux_ffn_dim = 32;
  c.prompt_enabled = prompt;
  return c;
}

StageConfig TinyStage(StageKind kind, int64_t steps) {
  StageConfig s = StageConfig::Toy(kind);
  s.max_steps = steps;
  s.warmup_steps = 10;
  s.batch_tokens = 80;
  return s;
}

struct Fixture {
  fs::path dir;
  data::PreparedToyData data;
  StageInputs inputs;

  Fixture() {
    dir = fs::temp_directory_path() / ("s2st_train_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    data::ToySpec spec = data::ToySpec::Default();
    spec.n_primary = 6;
    spec.n_secondary = 10;
    data = data::BuildToyDataset(spec, dir / "data");
    inputs = {data.primary, data.secondary};
  }
  ~Fixture() { fs::remove_all(dir); }
};

const Fixture& Data() {
  static const Fixture f;
  return f;
}

std::string ParamBytes(const model::Translatotron& m) {
  ByteWriter w;
  m.params().SerializeTo(w);
  return w.Release();
}

std::vector<double> Values(const model::Translatotron& m, const std::string& name) {
  const auto v = m.params().Get(name).values();
  return {v.begin(), v.end()};
}

bool PrefixUnchanged(const model::Translatotron& a, const model::Translatotron& b,
                     std::string_view prefix) {
  for (const auto& e : a.params().entries()) {
    if (e.name.rfind(prefix, 0) != 0) continue;
    if (Values(a, e.name) != Values(b, e.name)) return false;
  }
  return true;
}

bool SameLoss(const TrainLogEntry& a, const TrainLogEntry& b) {
  return a.loss.total == b.loss.total && a.loss.spec_loss == b.loss.spec_loss &&
         a.loss.stop_loss == b.loss.stop_loss && a.loss.aux_src_loss == b.loss.aux_src_loss &&
         a.loss.aux_tgt_loss == b.loss.aux_tgt_loss;
}

}  // namespace

TEST_CASE("learning rate schedule values") {
  CHECK(LrAtStep(4000, 0.006, 4000) == 0.006);
  CHECK(LrAtStep(2000, 0.006, 4000) == doctest::Approx(0.003));
  CHECK(LrAtStep(16000, 0.006, 4000) == doctest::Approx(0.003));
  // Scalar re-evaluation of min(step / warmup, sqrt(warmup / step)).
  for (int64_t s : {1, 17, 999, 4001, 12345}) {
    const double expect = 0.0015 * std::min(s / 4000.0, std::sqrt(4000.0 / s));
    CHECK(LrAtStep(s, 0.0015, 4000) == doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK(LrAtStep(9, 1.0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(LrAtStep(0, 0.006, 4000), ContractError);
}

TEST_CASE("learning rate rises to the warmup step and decays after it") {
  const int64_t warmup = 50;
  for (int64_t s = 1; s < warmup; ++s) CHECK(LrAtStep(s + 1, 1.0, warmup) > LrAtStep(s, 1.0, warmup));
  for (int64_t s = warmup; s < 400; ++s) CHECK(LrAtStep(s + 1, 1.0, warmup) < LrAtStep(s, 1.0, warmup));
  CHECK(std::fabs(LrAtStep(warmup + 1, 1.0, warmup) - LrAtStep(warmup, 1.0, warmup)) < 0.02);
}

TEST_CASE("Adam scalar step") {
  nd::ParameterSet ps;
  Rng rng(1);
  nd::Tensor p = ps.Create("p", {1}, nd::Init::kZeros, rng);
  AdamOptimizer opt(ps, {0.9, 0.98, 1e-9, 0.0});
  nd::GradientMap grads;
  grads.Set(p.id(), std::vector<double>({1.0}));
  opt.Step(ps, grads, 0.1, nd::Precision::kFloat64);
  // m_hat = 1, v_hat = 1, update = -0.1 * 1 / (1 + 1e-9).
  CHECK(ps.Get("p").at(0) == doctest::Approx(-0.1 / (1.0 + 1e-9)).epsilon(1e-15));
  CHECK(ps.Get("p").at(0) == doctest::Approx(-0.0999999999));
}

TEST_CASE("Adam with zero gradient leaves parameters and decays moments") {
  nd::ParameterSet ps;
  Rng rng(2);
  nd::Tensor p = ps.Create("p", {3}, nd::Init::kNormal, rng, 1.0);
  const std::vector<double> before(p.values().begin(), p.values().end());
  AdamOptimizer opt(ps);
  nd::GradientMap g1;
  g1.Set(p.id(), std::vector<double>({0.5, -0.5, 0.1}));
  opt.Step(ps, g1, 0.0, nd::Precision::kFloat64);
  CHECK(std::vector<double>(ps.Get("p").values().begin(), ps.Get("p").values().end()) == before);
  const std::vector<double> m1 = opt.first_moment(0), v1 = opt.second_moment(0);
  nd::GradientMap zero;
  zero.Set(p.id(), std::vector<double>({0.0, 0.0, 0.0}));
  const std::vector<double> after_first(ps.Get("p").values().begin(), ps.Get("p").values().end());
  opt.Step(ps, zero, 0.0, nd::Precision::kFloat64);
  for (int i = 0; i < 3; ++i) {
    CHECK(opt.first_moment(0)[i] == doctest::Approx(0.9 * m1[i]));
    CHECK(opt.second_moment(0)[i] == doctest::Approx(0.98 * v1[i]));
  }
  // A zero gradient on a fresh optimizer does not move the parameter.
  AdamOptimizer fresh(ps);
  fresh.Step(ps, zero, 0.1, nd::Precision::kFloat64);
  CHECK(std::vector<double>(ps.Get("p").values().begin(), ps.Get("p").values().end()) ==
        after_first);
}

TEST_CASE("Adam treats identical parameters identically") {
  nd::ParameterSet ps;
  Rng rng(3);
  nd::Tensor a = ps.Create("a", {2}, nd::Init::kOnes, rng);
  nd::Tensor b = ps.Create("b", {2}, nd::Init::kOnes, rng);
  AdamOptimizer opt(ps);
  for (int step = 0; step < 5; ++step) {
    nd::GradientMap g;
    const std::vector<double> grad = {0.3 * step - 0.5, 0.2};
    g.Set(a.id(), grad);
    g.Set(b.id(), grad);
    opt.Step(ps, g, 0.01, nd::Precision::kFloat64);
  }
  CHECK(ps.Get("a").values() == ps.Get("b").values());
}

TEST_CASE("Adam rejects gradients of the wrong shape") {
  nd::ParameterSet ps;
  Rng rng(4);
  nd::Tensor p = ps.Create("p", {2}, nd::Init::kZeros, rng);
  AdamOptimizer opt(ps);
  nd::GradientMap g;
  g.Set(p.id(), std::vector<double>({1.0, 1.0, 1.0}));
  CHECK_THROWS_AS(opt.Step(ps, g, 0.1, nd::Precision::kFloat64), ShapeError);
}

TEST_CASE("stage configs follow the published profiles") {
  const StageConfig fisher = StageConfig::Fisher(StageKind::kFinetune);
  CHECK(fisher.base_lr == 0.006);
  CHECK(fisher.warmup_steps == 4000);
  CHECK(fisher.batch_tokens == 60000);
  CHECK(fisher.dropout == 0.1);
  const StageConfig ted = StageConfig::TedEn2Zh(StageKind::kFinetune);
  CHECK(ted.base_lr == 0.0015);
  CHECK(ted.batch_tokens == 45000);
  const model::ModelConfig m = model::ModelConfig::Fisher();
  const auto pre = fisher.Weights(m, 1);
  CHECK(pre.spec == 1.0);
  const auto pw = StageConfig::Fisher(StageKind::kPretrain).Weights(m, 1);
  CHECK(pw.spec == 0.0);
  CHECK(pw.stop == 0.0);
  CHECK(pw.aux_src == 0.5);
  CHECK(pw.aux_tgt == 0.5);
  model::ModelConfig no_prompt = m;
  no_prompt.prompt_enabled = false;
  CHECK_THROWS_AS(StageConfig::Fisher(StageKind::kPrompt).Validate(no_prompt), ConfigError);
  StageConfig bad = fisher;
  bad.base_lr = 0.0;
  CHECK_THROWS_AS(bad.Validate(m), ConfigError);
  CHECK(StageConfig::FromJson(fisher.ToJson(), StageConfig{}).Fingerprint() == fisher.Fingerprint());
}

TEST_CASE("checkpoint save, load, save is byte identical") {
  const Fixture& f = Data();
  model::Translatotron m(TinyConfig(), 7);
  Trainer t(m, TinyStage(StageKind::kFinetune, 5), f.data.primary);
  t.Step();
  t.Step();
  const fs::path a = f.dir / "a.ckpt", b = f.dir / "b.ckpt";
  t.Save(a);
  model::Translatotron m2(TinyConfig(), 99);
  Trainer t2(m2, TinyStage(StageKind::kFinetune, 5), f.data.primary);
  t2.Resume(a);
  t2.Save(b);
  CHECK(ReadFileBytes(a) == ReadFileBytes(b));
  CHECK(ParamBytes(m) == ParamBytes(m2));
  const LoadedCheckpoint ck = ReadCheckpoint(a);
  CHECK(ck.meta.step == 2);
  CHECK(ck.meta.stage == StageKind::kFinetune);
  CHECK(ck.config.Fingerprint() == TinyConfig().Fingerprint());
}

TEST_CASE("truncated or corrupted checkpoints are rejected") {
  const Fixture& f = Data();
  model::Translatotron m(TinyConfig(), 7);
  Trainer t(m, TinyStage(StageKind::kFinetune, 5), f.data.primary);
  const fs::path path = f.dir / "full.ckpt";
  t.Save(path);
  const std::string bytes = ReadFileBytes(path);
  for (size_t cut : {size_t{4}, size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    WriteFileBytes(f.dir / "cut.ckpt", bytes.substr(0, cut));
    CHECK_THROWS_AS(ReadCheckpoint(f.dir / "cut.ckpt"), IntegrityError);
  }
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  WriteFileBytes(f.dir / "flip.ckpt", flipped);
  CHECK_THROWS_AS(ReadCheckpoint(f.dir / "flip.ckpt"), IntegrityError);
}

TEST_CASE("checkpoints refuse a different model or stage config") {
  const Fixture& f = Data();
  model::Translatotron m(TinyConfig(), 7);
  Trainer t(m, TinyStage(StageKind::kFinetune, 5), f.data.primary);
  const fs::path path = f.dir / "fp.ckpt";
  t.Save(path);
  model::ModelConfig other = TinyConfig();
  other.dropout = 0.2;
  model::Translatotron m_other(other, 7);
  CHECK_THROWS_AS(RestoreParameters(ReadCheckpoint(path), m_other), FingerprintError);
  Trainer t_other(m_other, TinyStage(StageKind::kFinetune, 5), f.data.primary);
  CHECK_THROWS_AS(t_other.Resume(path), FingerprintError);
  model::Translatotron m_same(TinyConfig(), 8);
  StageConfig stage = TinyStage(StageKind::kFinetune, 5);
  stage.base_lr = 0.001;
  Trainer t_stage(m_same, stage, f.data.primary);
  CHECK_THROWS_AS(t_stage.Resume(path), FingerprintError);
}

TEST_CASE("a resumed run continues exactly like an uninterrupted one") {
  const Fixture& f = Data();
  const StageConfig stage = TinyStage(StageKind::kFinetune, 8);
  model::Translatotron full(TinyConfig(), 3);
  Trainer uninterrupted(full, stage, f.data.primary);
  std::vector<TrainLogEntry> ref;
  for (int i = 0; i < 8; ++i) ref.push_back(uninterrupted.Step());

  model::Translatotron first(TinyConfig(), 3);
  Trainer head(first, stage, f.data.primary);
  for (int i = 0; i < 5; ++i) head.Step();
  head.Save(f.dir / "mid.ckpt");

  model::Translatotron second(TinyConfig(), 1234);
  Trainer tail(second, stage, f.data.primary);
  tail.Resume(f.dir / "mid.ckpt");
  CHECK(tail.step() == 5);
  for (int i = 5; i < 8; ++i) {
    const TrainLogEntry e = tail.Step();
    CHECK(e.step == ref[i].step);
    CHECK(SameLoss(e, ref[i]));
  }
  CHECK(ParamBytes(second) == ParamBytes(full));
}

TEST_CASE("identical seeds give identical loss sequences") {
  const Fixture& f = Data();
  const StageConfig stage = TinyStage(StageKind::kMixed, 10);
  const data::CorpusManifest manifest = StageManifest(stage, f.inputs);
  model::Translatotron a(TinyConfig(), 5), b(TinyConfig(), 5);
  Trainer ta(a, stage, manifest), tb(b, stage, manifest);
  for (int i = 0; i < 10; ++i) CHECK(SameLoss(ta.Step(), tb.Step()));
  CHECK(ParamBytes(a) == ParamBytes(b));
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  const Fixture& f = Data();
  StageConfig stage = TinyStage(StageKind::kFinetune, 3);
  // Stages require a positive rate; this one vanishes after float rounding.
  stage.base_lr = 1e-300;
  model::Translatotron m(TinyConfig(), 5);
  Trainer t(m, stage, f.data.primary);
  const model::Translatotron init = [&] {
    model::Translatotron copy(TinyConfig(), 5);
    copy.params().CopyValuesFrom(m.params());  // includes the feature statistics
    return copy;
  }();
  const TrainLogEntry e = t.Step();
  CHECK(std::isfinite(e.loss.total));
  CHECK(e.loss.total > 0.0);
  CHECK(PrefixUnchanged(m, init, ""));
}

TEST_CASE("pretraining never touches the spectrogram decoder") {
  const Fixture& f = Data();
  model::Translatotron m(TinyConfig(), 5);
  const model::Translatotron init(TinyConfig(), 5);
  const StageConfig stage = TinyStage(StageKind::kPretrain, 6);
  Trainer t(m, stage, StageManifest(stage, f.inputs));
  for (int i = 0; i < 6; ++i) {
    const TrainLogEntry e = t.Step();
    CHECK(e.loss.spec_loss == 0.0);
  }
  CHECK(PrefixUnchanged(m, init, model::kSpecDecoderPrefix));
  CHECK_FALSE(PrefixUnchanged(m, init, model::kEncoderPrefix));
  CHECK_FALSE(PrefixUnchanged(m, init, model::kAuxSourcePrefix));
  CHECK_FALSE(PrefixUnchanged(m, init, model::kAuxTargetPrefix));
}

TEST_CASE("the prompt stage feeds each record its own category") {
  const Fixture& f = Data();
  StageConfig stage = TinyStage(StageKind::kPrompt, 2);
  stage.freeze_non_prompt = true;
  // Only the prompt rows used by the batch receive gradient.
  auto rows_changed = [&](const data::CorpusManifest& manifest) {
    model::Translatotron m(TinyConfig(), 9);
    const std::vector<double> before = Values(m, std::string(model::kPromptName));
    Trainer t(m, stage, manifest);
    t.Step();
    const std::vector<double> after = Values(m, std::string(model::kPromptName));
    const size_t width = before.size() / 2;
    std::array<bool, 2> changed{};
    for (size_t i = 0; i < before.size(); ++i) {
      if (before[i] != after[i]) changed[i / width] = true;
    }
    CHECK(PrefixUnchanged(m, model::Translatotron(TinyConfig(), 9), model::kEncoderPrefix));
    return changed;
  };
  const auto primary = rows_changed(f.data.primary);
  CHECK(primary[0]);
  CHECK_FALSE(primary[1]);
  const auto secondary = rows_changed(f.data.secondary);
  CHECK_FALSE(secondary[0]);
  CHECK(secondary[1]);
}

TEST_CASE("a 200-step run logs every step with the scheduled learning rate") {
  const Fixture& f = Data();
  model::Translatotron m(TinyConfig(), 2);
  StageConfig stage = TinyStage(StageKind::kFinetune, 200);
  stage.checkpoint_every = 100;
  RunStageOptions opts;
  opts.out_dir = f.dir / "run200";
  const StageResult result = RunStage(m, stage, f.inputs, opts);
  const std::vector<TrainLogEntry> log = ReadTrainLog(opts.out_dir / "train_log.jsonl");
  REQUIRE(log.size() == 200);
  for (size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].step == static_cast<int64_t>(i + 1));
    const double s = static_cast<double>(i + 1);
    CHECK(log[i].lr == doctest::Approx(stage.base_lr * std::min(s / 10.0, std::sqrt(10.0 / s))));
  }
  CHECK(fs::exists(result.final_checkpoint));
  CHECK(fs::exists(opts.out_dir / "finetune_step100.ckpt"));
  // Resuming from the midpoint rewrites the log to the same 200 entries.
  model::Translatotron again(TinyConfig(), 2);
  RunStageOptions resume = opts;
  resume.out_dir = f.dir / "run200b";
  resume.resume_from = opts.out_dir / "finetune_step100.ckpt";
  RunStage(again, stage, f.inputs, resume);
  CHECK(ReadFileBytes(resume.out_dir / "finetune_final.ckpt") ==
        ReadFileBytes(result.final_checkpoint));
}

TEST_CASE("fine-tuning starts from the pretrained parameters") {
  const Fixture& f = Data();
  model::Translatotron m(TinyConfig(), 4);
  const model::Translatotron init(TinyConfig(), 4);
  RunStageOptions opts;
  opts.out_dir = f.dir / "reuse";
  const StageResult pre = RunStage(m, TinyStage(StageKind::kPretrain, 5), f.inputs, opts);
  const auto loaded = LoadModel(pre.final_checkpoint);
  CHECK(ParamBytes(*loaded) == ParamBytes(m));
  CHECK_FALSE(PrefixUnchanged(*loaded, init, model::kEncoderPrefix));
  // The fine-tuning trainer keeps the loaded values until its first step.
  Trainer ft(*loaded, TinyStage(StageKind::kFinetune, 5), f.data.primary);
  CHECK(PrefixUnchanged(*loaded, m, model::kEncoderPrefix));
  CHECK(PrefixUnchanged(*loaded, m, model::kAuxSourcePrefix));
  ft.Step();
  CHECK_FALSE(PrefixUnchanged(*loaded, m, model::kEncoderPrefix));
}

TEST_CASE("a non-finite loss reports the batch") {
  const Fixture& f = Data();
  model::Translatotron m(TinyConfig(), 4);
  Trainer t(m, TinyStage(StageKind::kFinetune, 3), f.data.primary);
  for (const auto& e : m.params().entries()) {
    if (e.name.rfind(model::kEncoderPrefix, 0) == 0 && e.trainable) {
      nd::Tensor(e.tensor).mutable_leaf_data()[0] = std::nan("");
      break;
    }
  }
  try {
    t.Step();
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("batch:") != std::string::npos);
    CHECK(std::string(e.what()).find("p0") != std::string::npos);
  }
}

TEST_CASE("stage manifests pair stages with data") {
  const Fixture& f = Data();
  CHECK(StageManifest(StageConfig::Toy(StageKind::kPretrain), f.inputs).records.size() ==
        f.data.secondary.records.size());
  CHECK(StageManifest(StageConfig::Toy(StageKind::kFinetune), f.inputs).records.size() ==
        f.data.primary.records.size());
  const size_t mixed = StageManifest(StageConfig::Toy(StageKind::kMixed), f.inputs).records.size();
  CHECK(mixed > f.data.secondary.records.size());
  StageInputs missing{f.data.primary, {}};
  CHECK_THROWS_AS(StageManifest(StageConfig::Toy(StageKind::kPretrain), missing), ContractError);
}
