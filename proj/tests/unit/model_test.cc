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

#include <chrono>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "s2st/common/error.h"
#include "s2st/common/phones.h"
#include "s2st/model/gradient_check.h"
#include "s2st/model/loss.h"
#include "s2st/model/translatotron.h"
#include "s2st/nd/autograd.h"
#include "s2st/nd/gradcheck.h"

using namespace s2st;
using namespace s2st::model;
using nd::ParameterSet;
using nd::Tensor;

namespace {

Tensor RandomMel(int64_t frames, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(frames * 80);
  for (double& x : v) x = rng.Normal(0.0, 1.0);
  return Tensor::FromData({frames, 80}, std::move(v));
}

ModelConfig SmallConfig() {
  ModelConfig c = ModelConfig::GradCheck();
  c.precision = nd::Precision::kFloat64;
  return c;
}

void Randomize(ParameterSet& ps, uint64_t seed, double scale = 0.5) {
  Rng rng(seed);
  for (const auto& e : ps.entries()) {
    if (!e.trainable) continue;
    for (double& v : Tensor(e.tensor).mutable_leaf_data()) v = rng.Uniform(-scale, scale);
  }
}

std::vector<double> Rows(const Tensor& t, int64_t begin, int64_t end) {
  const int64_t width = t.numel() / t.dim(0);
  return {t.values().begin() + begin * width, t.values().begin() + end * width};
}

// Independent loop-based re-implementation of the auxiliary decoder used as a
// replay oracle.
using Mat = std::vector<std::vector<double>>;

Mat ToMat(const Tensor& t) {
  const int64_t rows = t.rank() == 1 ? 1 : t.dim(0);
  const int64_t cols = t.numel() / rows;
  Mat m(rows, std::vector<double>(cols));
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) m[r][c] = t.at(r * cols + c);
  }
  return m;
}

Mat Dot(const Mat& a, const Mat& b) {
  Mat out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t k = 0; k < b.size(); ++k) {
      for (size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

Mat PlusRow(Mat a, const Tensor& bias) {
  for (auto& row : a) {
    for (size_t j = 0; j < row.size(); ++j) row[j] += bias.at(j);
  }
  return a;
}

Mat Norm(const Mat& x, const ParameterSet& ps, const std::string& name) {
  const Tensor g = ps.Get(name + ".gain"), b = ps.Get(name + ".bias");
  Mat out = x;
  for (size_t r = 0; r < x.size(); ++r) {
    double mean = 0.0, var = 0.0;
    for (double v : x[r]) mean += v;
    mean /= x[r].size();
    for (double v : x[r]) var += (v - mean) * (v - mean);
    var /= x[r].size();
    for (size_t c = 0; c < x[r].size(); ++c) {
      out[r][c] = (x[r][c] - mean) / std::sqrt(var + 1e-5) * g.at(c) + b.at(c);
    }
  }
  return out;
}

Mat Attend(const Mat& q, const Mat& kv, const ParameterSet& ps, const std::string& name,
           int heads, bool causal) {
  const Mat qp = PlusRow(Dot(q, ToMat(ps.Get(name + ".wq"))), ps.Get(name + ".bq"));
  const Mat kp = Dot(kv, ToMat(ps.Get(name + ".wk")));
  const Mat vp = PlusRow(Dot(kv, ToMat(ps.Get(name + ".wv"))), ps.Get(name + ".bv"));
  const size_t d = qp[0].size(), dh = d / heads;
  Mat merged(q.size(), std::vector<double>(d, 0.0));
  for (int h = 0; h < heads; ++h) {
    for (size_t i = 0; i < q.size(); ++i) {
      const size_t limit = causal ? i + 1 : kv.size();
      std::vector<double> s(limit);
      double mx = -1e300, z = 0.0;
      for (size_t j = 0; j < limit; ++j) {
        double acc = 0.0;
        for (size_t c = 0; c < dh; ++c) acc += qp[i][h * dh + c] * kp[j][h * dh + c];
        s[j] = acc / std::sqrt(static_cast<double>(dh));
        mx = std::max(mx, s[j]);
      }
      for (size_t j = 0; j < limit; ++j) z += std::exp(s[j] - mx);
      for (size_t j = 0; j < limit; ++j) {
        const double w = std::exp(s[j] - mx) / z;
        for (size_t c = 0; c < dh; ++c) merged[i][h * dh + c] += w * vp[j][h * dh + c];
      }
    }
  }
  return PlusRow(Dot(merged, ToMat(ps.Get(name + ".wo"))), ps.Get(name + ".bo"));
}

Mat AddMat(Mat a, const Mat& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a[i].size(); ++j) a[i][j] += b[i][j];
  }
  return a;
}

Mat OracleAuxLogits(const ParameterSet& ps, const ModelConfig& c, const Mat& tap_state,
                    const std::vector<int64_t>& phones) {
  const std::string p = "aux_src.";
  const Mat table = ToMat(ps.Get(p + "embedding"));
  Mat x;
  for (size_t pos = 0; pos < phones.size(); ++pos) {
    std::vector<double> row = table[phones[pos]];
    for (int i = 0; i < c.aux_dim / 2; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * i / c.aux_dim);
      row[2 * i] += std::sin(angle);
      row[2 * i + 1] += std::cos(angle);
    }
    x.push_back(row);
  }
  const Mat memory = Norm(tap_state, ps, p + "memory_ln");
  for (int l = 1; l <= c.aux_src_layers; ++l) {
    const std::string lp = p + "layer" + std::to_string(l);
    x = AddMat(x, Attend(Norm(x, ps, lp + ".ln_self"), Norm(x, ps, lp + ".ln_self"), ps,
                         lp + ".self_attn", c.aux_heads, true));
    x = AddMat(x, Attend(Norm(x, ps, lp + ".ln_cross"), memory, ps, lp + ".cross_attn",
                         c.aux_heads, false));
    Mat h = PlusRow(Dot(Norm(x, ps, lp + ".ln_ffn"), ToMat(ps.Get(lp + ".ffn.in.w"))),
                    ps.Get(lp + ".ffn.in.b"));
    for (auto& row : h) {
      for (double& v : row) v = std::max(v, 0.0);
    }
    x = AddMat(x, PlusRow(Dot(h, ToMat(ps.Get(lp + ".ffn.out.w"))), ps.Get(lp + ".ffn.out.b")));
  }
  return PlusRow(Dot(Norm(x, ps, p + "final_ln"), ToMat(ps.Get(p + "out.w"))), ps.Get(p + "out.b"));
}

}  // namespace

TEST_CASE("conv subsampling follows the ceil-of-ceil law") {
  Translatotron m(SmallConfig(), 1);
  RunContext ctx;
  for (auto [t, expected] : std::vector<std::pair<int64_t, int64_t>>{{100, 25}, {1, 1}, {7, 2}, {8, 2}, {9, 3}}) {
    const Tensor y = m.ConvSubsample(RandomMel(t, t), ctx);
    CHECK(y.dim(0) == expected);
    CHECK(y.dim(1) == m.config().enc_dim);
  }
  CHECK_THROWS_AS(m.ConvSubsample(Tensor::Zeros({0, 80}), ctx), InvalidArgumentError);
}

TEST_CASE("encoder keeps every layer state and prepends the prompt token") {
  ModelConfig c = SmallConfig();
  Translatotron m(c, 2);
  RunContext ctx;
  const Tensor mel = RandomMel(40, 3);
  const EncoderStates plain = m.Encode(mel, std::nullopt, ctx);
  REQUIRE(plain.layers.size() == 2u);
  for (const Tensor& s : plain.layers) CHECK(s.shape() == nd::Shape{10, c.enc_dim});
  const EncoderStates primary = m.Encode(mel, PromptCategory::kPrimary, ctx);
  const EncoderStates secondary = m.Encode(mel, PromptCategory::kSecondary, ctx);
  for (const Tensor& s : primary.layers) CHECK(s.shape() == nd::Shape{11, c.enc_dim});
  CHECK(Rows(primary.layers[0], 0, 1) != Rows(secondary.layers[0], 0, 1));

  c.prompt_enabled = false;
  Translatotron no_prompt(c, 2);
  CHECK_THROWS_AS(no_prompt.Encode(mel, PromptCategory::kPrimary, ctx), ConfigError);
}

TEST_CASE("feature-frame prompt attachment goes through the convolutions") {
  ModelConfig c = SmallConfig();
  c.prompt_attachment = PromptAttachment::kFeatureFrame;
  Translatotron m(c, 2);
  RunContext ctx;
  const EncoderStates s = m.Encode(RandomMel(40, 3), PromptCategory::kSecondary, ctx);
  CHECK(s.length() == 11);  // ceil(ceil(41/2)/2)
  CHECK(m.params().Get(kPromptName).shape() == nd::Shape{2, 80});
}

TEST_CASE("spectrogram decoder groups frames by the reduction factor") {
  Translatotron m(SmallConfig(), 4);
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(12, 5), std::nullopt, ctx);
  const DecoderOutput out = m.DecodeSpectrogram(enc, RandomMel(8, 6), ctx);
  CHECK(out.steps == 2);
  CHECK(out.stop_logits.shape() == nd::Shape{2});
  CHECK(out.mel_before.shape() == nd::Shape{8, 80});
  CHECK(out.mel_after.shape() == nd::Shape{8, 80});
  CHECK_THROWS_AS(m.DecodeSpectrogram(enc, RandomMel(7, 6), ctx), ContractError);
}

TEST_CASE("decoder steps never see later target frames") {
  Translatotron m(SmallConfig(), 7);
  Randomize(m.params(), 70, 0.3);
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(16, 8), std::nullopt, ctx);
  const int64_t r = m.config().reduction_factor;
  const Tensor target = RandomMel(5 * r, 9);
  const DecoderOutput base = m.DecodeSpectrogram(enc, target, ctx);
  for (int64_t k = 0; k < 4; ++k) {
    std::vector<double> changed = target.values();
    for (size_t i = (k + 1) * r * 80; i < changed.size(); ++i) changed[i] += 3.0;
    const DecoderOutput out = m.DecodeSpectrogram(enc, Tensor::FromData({5 * r, 80}, changed), ctx);
    CAPTURE(k);
    CHECK(Rows(out.mel_before, 0, (k + 1) * r) == Rows(base.mel_before, 0, (k + 1) * r));
    CHECK(Rows(out.mel_after, 0, (k + 1) * r) == Rows(base.mel_after, 0, (k + 1) * r));
    for (int64_t s = 0; s <= k; ++s) CHECK(out.stop_logits.at(s) == base.stop_logits.at(s));
    // The last group is never fed back.
    if (k < 3) CHECK(Rows(out.mel_before, 0, 5 * r) != Rows(base.mel_before, 0, 5 * r));
  }
}

TEST_CASE("mel_after is mel_before plus the post-net output") {
  Translatotron m(SmallConfig(), 10);
  Randomize(m.params(), 11, 0.3);
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(9, 12), std::nullopt, ctx);
  const DecoderOutput out = m.DecodeSpectrogram(enc, RandomMel(12, 13), ctx);
  const Tensor post = m.PostNet(out.mel_before, ctx);
  for (int64_t i = 0; i < out.mel_after.numel(); ++i) {
    CHECK(out.mel_after.at(i) == out.mel_before.at(i) + post.at(i));
  }
}

TEST_CASE("auxiliary logits have one row per input symbol") {
  Translatotron m(SmallConfig(), 14);
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(12, 15), std::nullopt, ctx);
  const std::vector<int64_t> phones = {kBosId, 3, 4, 5};
  const Tensor logits = m.DecodeAuxiliary(enc, AuxTask::kSource, phones, ctx);
  CHECK(logits.shape() == nd::Shape{4, m.config().src_phone_vocab});
  const std::vector<int64_t> bad = {kBosId, 99};
  CHECK_THROWS_AS(m.DecodeAuxiliary(enc, AuxTask::kSource, bad, ctx), VocabError);
  const std::vector<int64_t> no_bos = {3};
  CHECK_THROWS_AS(m.DecodeAuxiliary(enc, AuxTask::kTarget, no_bos, ctx), ContractError);
}

TEST_CASE("auxiliary logits match a loop-based replay of the same weights") {
  ModelConfig c = SmallConfig();
  c.src_phone_vocab = 3;
  Translatotron m(c, 16);
  Randomize(m.params(), 17, 0.4);
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(8, 18), std::nullopt, ctx);
  const std::vector<int64_t> phones = {kBosId, 2};
  const Tensor logits = m.DecodeAuxiliary(enc, AuxTask::kSource, phones, ctx);
  const Mat expected = OracleAuxLogits(m.params(), c, ToMat(enc.layers[c.tap_src - 1]), phones);
  REQUIRE(logits.shape() == nd::Shape{2, 3});
  for (int i = 0; i < 2; ++i) {
    for (int v = 0; v < 3; ++v) CHECK(logits.at(i * 3 + v) == doctest::Approx(expected[i][v]).epsilon(1e-10));
  }
}

TEST_CASE("source auxiliary decoder is isolated from encoder layers above its tap") {
  Translatotron m(SmallConfig(), 19);
  RunContext ctx;
  const Tensor mel = RandomMel(12, 20);
  const std::vector<int64_t> phones = {kBosId, 3, 4};
  const Tensor before = m.DecodeAuxiliary(m.Encode(mel, std::nullopt, ctx), AuxTask::kSource, phones, ctx);
  for (const auto& e : m.params().entries()) {
    if (e.name.rfind("enc.layer2.", 0) == 0) {
      for (double& v : Tensor(e.tensor).mutable_leaf_data()) v += 0.25;
    }
  }
  const EncoderStates enc = m.Encode(mel, std::nullopt, ctx);
  const Tensor after = m.DecodeAuxiliary(enc, AuxTask::kSource, phones, ctx);
  CHECK(after.values() == before.values());

  const std::vector<int64_t> targets = {3, 4, kEosId};
  LossAccumulator acc(0.1, 5.0);
  acc.AddAuxiliary(AuxTask::kSource, after, targets);
  const nd::GradientMap g = nd::Backward(acc.Finish({0, 0, 1, 0}).total);
  int checked = 0;
  for (const auto& e : m.params().entries()) {
    if (e.name.rfind("enc.layer2.", 0) == 0 || e.name.rfind("enc.final_ln", 0) == 0) {
      for (double v : g.Get(e.tensor)) CHECK(v == 0.0);
      ++checked;
    }
  }
  CHECK(checked > 0);
  CHECK(g.contains(m.params().Get("enc.layer1.attn.wq")));
}

TEST_CASE("forced stop and forced run-out during inference") {
  Translatotron m(SmallConfig(), 21);
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(12, 22), std::nullopt, ctx);
  Tensor bias = m.params().Get("spec.stop_proj.b");
  bias.mutable_leaf_data()[0] = 1e4;
  InferenceResult r = m.InferSpectrogram(enc, 0.5, 10);
  CHECK(r.stopped_early);
  CHECK(r.steps == 1);
  CHECK(r.num_frames == 4);
  bias.mutable_leaf_data()[0] = -1e4;
  r = m.InferSpectrogram(enc, 0.5, 5);
  CHECK_FALSE(r.stopped_early);
  CHECK(r.num_frames == 20);
  CHECK(r.mel.size() == 20u * 80u);
}

TEST_CASE("inference replays teacher forcing on its own outputs") {
  Translatotron m(SmallConfig(), 23);
  Randomize(m.params(), 24, 0.2);
  Tensor bias = m.params().Get("spec.stop_proj.b");
  bias.mutable_leaf_data()[0] = -1e4;
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(12, 25), std::nullopt, ctx);
  const InferenceResult r = m.InferSpectrogram(enc, 0.5, 3);
  const DecoderOutput tf = m.DecodeSpectrogram(enc, MelTensor(r.mel, r.num_frames), ctx);
  // Feeding the free-running output back as the target must reproduce it,
  // since each step only sees earlier groups.
  const InferenceResult again = m.InferSpectrogram(enc, 0.5, 3);
  CHECK(again.mel == r.mel);
  CHECK(tf.mel_after.numel() == static_cast<int64_t>(r.mel.size()));
}

TEST_CASE("loss with perfect predictions and no smoothing is near zero") {
  const int64_t steps = 2, r = 4;
  const Tensor target = RandomMel(steps * r, 26);
  DecoderOutput out;
  out.steps = steps;
  out.mel_before = target;
  out.mel_after = target;
  out.stop_logits = Tensor::FromData({steps}, {-50.0, 50.0});
  LossAccumulator acc(0.0, 5.0);
  acc.AddSpectrogram(out, target, steps * r, r);
  const std::vector<int64_t> ids = {3, 4, kEosId};
  std::vector<double> logits(3 * 6, 0.0);
  for (int i = 0; i < 3; ++i) logits[i * 6 + ids[i]] = 60.0;
  acc.AddAuxiliary(AuxTask::kSource, Tensor::FromData({3, 6}, logits), ids);
  acc.AddAuxiliary(AuxTask::kTarget, Tensor::FromData({3, 6}, logits), ids);
  const LossBreakdown b = acc.Finish({1, 1, 0.3, 0.3}).breakdown;
  CHECK(b.total < 1e-6);
}

TEST_CASE("loss matches a hand computation for one decoder step") {
  // r = 1 with one frame: prediction 0.5 everywhere, target 0 everywhere.
  DecoderOutput out;
  out.steps = 1;
  out.mel_before = Tensor::Full({1, 80}, 0.5);
  out.mel_after = Tensor::Full({1, 80}, -1.0);
  out.stop_logits = Tensor::FromData({1}, {0.0});
  LossAccumulator acc(0.0, 5.0);
  acc.AddSpectrogram(out, Tensor::Zeros({1, 80}), 1, 1);
  // Two-class logits [0, ln 3] with target class 1: -log(3/4).
  const std::vector<int64_t> ids = {1};
  acc.AddAuxiliary(AuxTask::kSource, Tensor::FromData({1, 3}, {0.0, std::log(3.0), -1e3}), ids);
  const LossBreakdown b = acc.Finish({1, 1, 0.5, 0.0}).breakdown;
  const double spec = (0.5 + 0.25) + (1.0 + 1.0);
  const double stop = 5.0 * std::log(2.0);
  const double aux = -std::log(3.0 / 4.0);
  CHECK(b.spec_loss == doctest::Approx(spec).epsilon(1e-12));
  CHECK(b.stop_loss == doctest::Approx(stop).epsilon(1e-12));
  CHECK(b.aux_src_loss == doctest::Approx(aux).epsilon(1e-9));
  CHECK(b.total == doctest::Approx(spec + stop + 0.5 * aux).epsilon(1e-12));
}

TEST_CASE("loss composition holds for random weights and padding is ignored") {
  Translatotron m(SmallConfig(), 27);
  RunContext ctx;
  const EncoderStates enc = m.Encode(RandomMel(12, 28), std::nullopt, ctx);
  const Tensor target = RandomMel(12, 29);
  const DecoderOutput out = m.DecodeSpectrogram(enc, target, ctx);
  const std::vector<int64_t> in = {kBosId, 3, 4}, tgt = {3, 4, kEosId};
  const Tensor src_logits = m.DecodeAuxiliary(enc, AuxTask::kSource, in, ctx);
  const Tensor tgt_logits = m.DecodeAuxiliary(enc, AuxTask::kTarget, in, ctx);
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    LossAccumulator acc(0.1, 5.0);
    acc.AddSpectrogram(out, target, 10, 4);
    acc.AddAuxiliary(AuxTask::kSource, src_logits, tgt);
    acc.AddAuxiliary(AuxTask::kTarget, tgt_logits, tgt);
    const double ws = trial == 0 ? 0.0 : rng.Uniform(0, 2), wt = trial == 0 ? 0.0 : rng.Uniform(0, 2);
    const LossBreakdown b = acc.Finish({1, 1, ws, wt}).breakdown;
    CHECK(b.total == doctest::Approx(b.spec_loss + b.stop_loss + ws * b.aux_src_loss + wt * b.aux_tgt_loss).epsilon(1e-12));
    if (trial == 0) CHECK(b.total == doctest::Approx(b.spec_loss + b.stop_loss).epsilon(1e-15));
  }
  // Changing the prediction in pad frames does not move the loss.
  LossAccumulator a(0.1, 5.0), b(0.1, 5.0);
  a.AddSpectrogram(out, target, 10, 4);
  std::vector<double> t2 = target.values();
  for (size_t i = 10 * 80; i < t2.size(); ++i) t2[i] += 7.0;
  b.AddSpectrogram(out, Tensor::FromData({12, 80}, t2), 10, 4);
  CHECK(a.Finish({}).breakdown.spec_loss == b.Finish({}).breakdown.spec_loss);

  LossAccumulator empty(0.1, 5.0);
  empty.AddSpectrogram(out, target, 0, 4);
  const std::vector<int64_t> pads = {kPadId, kPadId, kPadId};
  empty.AddAuxiliary(AuxTask::kSource, src_logits, pads);
  CHECK_THROWS_AS(empty.Finish({}), DegenerateBatchError);
}

TEST_CASE("parameter count is a function of the config") {
  const ModelConfig fisher = ModelConfig::Fisher();
  const ModelConfig ted = ModelConfig::TedEn2Zh();
  CHECK(fisher.enc_layers == 12);
  CHECK(fisher.enc_dim == 512);
  CHECK(ted.aux_src_layers == 4);
  CHECK(ted.tap_src == 4);
  ModelConfig ted_like = fisher;
  ted_like.aux_src_layers = ted_like.aux_tgt_layers = 4;
  ted_like.tap_src = 4;
  CHECK(ted_like.Fingerprint() == ted.Fingerprint());
  const Translatotron a(ModelConfig::Toy(), 1), b(ModelConfig::Toy(), 99);
  CHECK(a.params().TrainableElements() == b.params().TrainableElements());
  CHECK(a.params().size() == b.params().size());
  ModelConfig bad = ModelConfig::Toy();
  bad.tap_src = 3;
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
}

TEST_CASE("config json round trip rejects unknown keys") {
  const ModelConfig t = ModelConfig::Toy();
  const ModelConfig back = ModelConfig::FromJson(t.ToJson(), ModelConfig());
  CHECK(back.Fingerprint() == t.Fingerprint());
  nlohmann::json j = t.ToJson();
  j["bogus"] = 1;
  CHECK_THROWS_AS(ModelConfig::FromJson(j, ModelConfig()), ConfigError);
}

TEST_CASE("full-model loss passes the finite-difference check in 64-bit mode") {
  const auto start = std::chrono::steady_clock::now();
  const ModelGradientReport report = CheckModelGradients(31);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("entries=" << report.diff.entries_checked << " max_rel=" << report.diff.max_relative_error
                     << " worst=" << report.worst_parameter << " seconds=" << seconds);
  CHECK(report.diff.entries_checked > 10000);
  CHECK(report.diff.max_relative_error < 1e-3);
}
