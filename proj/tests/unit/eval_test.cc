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
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "s2st/common/error.h"
#include "s2st/common/phones.h"
#include "s2st/common/random.h"
#include "s2st/data/toy_dataset.h"
#include "s2st/eval/asr_bleu.h"
#include "s2st/eval/decode.h"
#include "s2st/eval/evaluate.h"
#include "s2st/eval/metrics.h"
#include "s2st/model/translatotron.h"
#include "s2st/train/dataset.h"
#include "support/oracles.h"

using namespace s2st;
using namespace s2st::eval;
namespace fs = std::filesystem;

namespace {

void Randomize(nd::ParameterSet& ps, uint64_t seed, double scale) {
  Rng rng(seed);
  for (const auto& e : ps.entries()) {
    if (!e.trainable) continue;
    for (double& v : nd::Tensor(e.tensor).mutable_leaf_data()) v = rng.Uniform(-scale, scale);
  }
}

nd::Tensor RandomMel(int64_t frames, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(frames * 80);
  for (double& x : v) x = rng.Normal(0.0, 1.0);
  return nd::Tensor::FromData({frames, 80}, std::move(v));
}

// Small model whose target decoder emits EOS or one of three phones.
model::Translatotron DecoderModel(uint64_t seed) {
  model::ModelConfig c = model::ModelConfig::GradCheck();
  c.tgt_phone_vocab = kNumSpecialPhones + 3;
  c.prompt_enabled = false;
  model::Translatotron m(c, seed);
  Randomize(m.params(), seed + 100, 0.6);
  return m;
}

model::EncoderStates EncodeRandom(const model::Translatotron& m, uint64_t seed) {
  model::RunContext ctx;
  nd::NoGradGuard no_grad;
  return m.Encode(RandomMel(12, seed), std::nullopt, ctx);
}

// Prepared toy data shared by the tests in this file.
struct ToyFixture {
  fs::path dir;
  data::PreparedToyData data;
  model::ModelConfig config;

  ToyFixture() {
    dir = fs::temp_directory_path() / ("s2st_eval_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    data::ToySpec spec = data::ToySpec::Default();
    spec.n_primary = 4;
    spec.n_secondary = 4;
    spec.n_eval = 6;
    data = data::BuildToyDataset(spec, dir);
    config = model::ModelConfig::Toy();
  }
  ~ToyFixture() { fs::remove_all(dir); }

  model::Translatotron Model(uint64_t seed) const {
    model::Translatotron m(config, seed);
    train::InitializeStats(m, train::LoadExamples(data.eval, true));
    return m;
  }
};

const ToyFixture& Toy() {
  static const ToyFixture fixture;
  return fixture;
}

class ScriptedAsr : public data::InProcessClient {
 public:
  explicit ScriptedAsr(std::map<std::string, std::string> answers, bool fail_all = false)
      : answers_(std::move(answers)), fail_all_(fail_all) {}
  data::ClientResponse Handle(const data::ClientRequest& req) override {
    data::ClientResponse r;
    r.id = req.id;
    if (fail_all_ || !fs::exists(req.audio)) {
      r.ok = false;
      r.err = "unavailable";
      return r;
    }
    r.ok = true;
    r.text = answers_.at(req.id);
    return r;
  }

 private:
  std::map<std::string, std::string> answers_;
  bool fail_all_;
};

}  // namespace

TEST_CASE("PER examples") {
  const std::vector<int64_t> abc = {1, 2, 3};
  CHECK(PhonemeErrorRate(abc, abc) == 0.0);
  CHECK(PhonemeErrorRate(abc, std::vector<int64_t>{1, 3}) == doctest::Approx(1.0 / 3.0));
  CHECK(PhonemeErrorRate(std::vector<int64_t>{1}, std::vector<int64_t>{2, 3}) == 2.0);
  CHECK_THROWS_AS(PhonemeErrorRate(std::vector<int64_t>{}, abc), UndefinedError);
}

TEST_CASE("edit distance equals edit-path enumeration on all short binary pairs") {
  const auto seqs = testing::AllSequences(2, 0, 6);
  int64_t pairs = 0;
  for (const auto& ref : seqs) {
    for (const auto& hyp : seqs) {
      const EditCounts e = AlignSequences(ref, hyp);
      REQUIRE(e.distance() == testing::EnumerateEditPaths(ref, hyp));
      REQUIRE(static_cast<int64_t>(ref.size()) - e.deletions + e.insertions ==
              static_cast<int64_t>(hyp.size()));
      ++pairs;
    }
  }
  CHECK(pairs == 127 * 127);
}

TEST_CASE("edit distance equals edit-path enumeration on random pairs over four symbols") {
  Rng rng(5);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<int64_t> a(rng.UniformInt(0, 6)), b(rng.UniformInt(0, 6));
    for (auto& x : a) x = rng.UniformInt(0, 3);
    for (auto& x : b) x = rng.UniformInt(0, 3);
    REQUIRE(AlignSequences(a, b).distance() == testing::EnumerateEditPaths(a, b));
  }
}

TEST_CASE("BLEU boundary values") {
  CHECK(CorpusBleu({"the cat sat on the mat"}, {"the cat sat on the mat"},
                   BleuMode::kWordCiDetok) == doctest::Approx(100.0));
  CHECK(CorpusBleu({"dog runs"}, {"the cat sat"}, BleuMode::kWordCiDetok) == 0.0);
  CHECK_THROWS_AS(CorpusBleu({"a"}, {"a", "b"}, BleuMode::kWordCiDetok), ContractError);
  CHECK_THROWS_AS(CorpusBleu({}, {}, BleuMode::kWordCiDetok), ContractError);
}

TEST_CASE("BLEU matches hand-computed values") {
  // Brevity penalty exp(1 - 4/3); all four precisions are 1 (the empty
  // 4-gram precision is smoothed to 1/1).
  CHECK(std::fabs(CorpusBleu({"the cat sat"}, {"the cat sat down"}, BleuMode::kWordCiDetok) -
                  71.65313105737893) < 1e-6);
  // Precisions 4/5, 3/4, 2/3, 1/2; no penalty.
  CHECK(std::fabs(CorpusBleu({"a b c d e"}, {"a b c d f"}, BleuMode::kWordCiDetok) -
                  66.8740304976422) < 1e-6);
  // Characters: 2/3, 1/2, smoothed 1/2, smoothed 1/1.
  CHECK(std::fabs(CorpusBleu({"你好吗"}, {"你好"}, BleuMode::kChar) - 63.89431042462724) < 1e-6);
}

TEST_CASE("BLEU word mode is case-insensitive and splits punctuation") {
  CHECK(BleuTokenize("The Cat, sat.", BleuMode::kWordCiDetok) ==
        std::vector<std::string>{"the", "cat", ",", "sat", "."});
  CHECK(CorpusBleu({"The Cat sat down."}, {"the cat sat down ."}, BleuMode::kWordCiDetok) ==
        doctest::Approx(100.0));
  CHECK(BleuTokenize("A b", BleuMode::kPhone) == std::vector<std::string>{"A", "b"});
  CHECK(BleuTokenize("我 爱", BleuMode::kChar) == std::vector<std::string>{"我", "爱"});
}

TEST_CASE("corpus BLEU is invariant to segment order") {
  std::vector<std::string> hyps = {"a b c d", "e f g", "h i j k l", "a c e"};
  std::vector<std::string> refs = {"a b c e", "e f g h", "h i k l", "a b e"};
  const double base = CorpusBleu(hyps, refs, BleuMode::kWordCiDetok);
  std::swap(hyps[0], hyps[2]);
  std::swap(refs[0], refs[2]);
  std::swap(hyps[1], hyps[3]);
  std::swap(refs[1], refs[3]);
  CHECK(CorpusBleu(hyps, refs, BleuMode::kWordCiDetok) == base);
}

TEST_CASE("Spearman correlation") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  CHECK(SpearmanCorrelation(a, std::vector<double>{10, 20, 30, 40, 50}) == doctest::Approx(1.0));
  CHECK(SpearmanCorrelation(a, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
  // Ties take average ranks: ranks of b are 1.5, 1.5, 3, 4, 5.
  const std::vector<double> b = {7, 7, 8, 9, 10};
  CHECK(SpearmanCorrelation(a, b) == doctest::Approx(0.9746794344808963));
  CHECK_THROWS_AS(SpearmanCorrelation(a, std::vector<double>{1, 1, 1, 1, 1}), UndefinedError);
}

TEST_CASE("beam size 1 reproduces greedy decoding") {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const auto m = DecoderModel(seed);
    const auto enc = EncodeRandom(m, seed);
    DecodeConfig greedy;
    greedy.max_len = 8;
    DecodeConfig beam = greedy;
    beam.mode = DecodeConfig::Mode::kBeam;
    CHECK(DecodePhonemes(m, enc, model::AuxTask::kTarget, greedy) ==
          DecodePhonemes(m, enc, model::AuxTask::kTarget, beam));
  }
}

TEST_CASE("decode length limits") {
  const auto m = DecoderModel(3);
  const auto enc = EncodeRandom(m, 3);
  for (auto mode : {DecodeConfig::Mode::kGreedy, DecodeConfig::Mode::kBeam}) {
    DecodeConfig cfg;
    cfg.mode = mode;
    cfg.beam_size = mode == DecodeConfig::Mode::kBeam ? 3 : 1;
    cfg.max_len = 1;
    CHECK(DecodePhonemes(m, enc, model::AuxTask::kTarget, cfg).size() <= 1);
    cfg.max_len = 0;
    CHECK(DecodePhonemes(m, enc, model::AuxTask::kTarget, cfg).empty());
  }
  DecodeConfig bad;
  bad.beam_size = 2;
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
}

TEST_CASE("beam search matches enumeration with the same pruning") {
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    const auto m = DecoderModel(seed);
    const auto enc = EncodeRandom(m, 50 + seed);
    for (int beam = 1; beam <= 3; ++beam) {
      for (int max_len = 1; max_len <= 3; ++max_len) {
        DecodeConfig cfg;
        cfg.mode = DecodeConfig::Mode::kBeam;
        cfg.beam_size = beam;
        cfg.max_len = max_len;
        CAPTURE(seed);
        CAPTURE(beam);
        CAPTURE(max_len);
        CHECK(DecodePhonemes(m, enc, model::AuxTask::kTarget, cfg) ==
              testing::PrunedSearchOracle(m, enc, model::AuxTask::kTarget, beam, max_len, 0.6));
      }
    }
  }
}

TEST_CASE("an unpruned beam finds the exhaustive optimum") {
  // With three phones and max_len 3 at most 4 + 12 + 36 candidates exist per
  // level, so a beam of 36 never prunes.
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const auto m = DecoderModel(seed);
    const auto enc = EncodeRandom(m, 80 + seed);
    DecodeConfig cfg;
    cfg.mode = DecodeConfig::Mode::kBeam;
    cfg.beam_size = 36;
    cfg.max_len = 3;
    CHECK(DecodePhonemes(m, enc, model::AuxTask::kTarget, cfg) ==
          testing::ExhaustiveBest(m, enc, model::AuxTask::kTarget, 3, 0.6));
  }
}

TEST_CASE("sequence log-probability agrees with a single full decoder pass") {
  const auto m = DecoderModel(2);
  const auto enc = EncodeRandom(m, 2);
  const std::vector<int64_t> seq = {3, 5, 4};
  CHECK(SequenceLogProb(m, enc, model::AuxTask::kTarget, seq, true) ==
        doctest::Approx(testing::ScoreOf(m, enc, model::AuxTask::kTarget, seq, true)).epsilon(1e-12));
}

TEST_CASE("ASR-BLEU with an oracle client scores 100") {
  const ToyFixture& toy = Toy();
  const auto m = toy.Model(3);
  std::map<std::string, std::string> answers;
  for (const auto& r : toy.data.eval.records) answers[r.id] = r.tgt_text;
  ScriptedAsr asr(answers);
  AsrBleuConfig cfg;
  cfg.out_dir = toy.dir / "asr_oracle";
  cfg.griffin_lim_iterations = 4;
  const AsrBleuResult res = AsrBleu(m, toy.data.eval, asr, cfg);
  REQUIRE(res.score.has_value());
  CHECK(*res.score == doctest::Approx(100.0));
  CHECK(res.coverage == 1.0);
  for (const auto& row : res.rows) {
    CHECK(fs::exists(row.wav));
    CHECK(fs::exists(row.mel));
  }
}

TEST_CASE("ASR-BLEU is undefined when every request fails") {
  const ToyFixture& toy = Toy();
  const auto m = toy.Model(3);
  ScriptedAsr asr({}, true);
  AsrBleuConfig cfg;
  cfg.out_dir = toy.dir / "asr_fail";
  cfg.griffin_lim_iterations = 2;
  const AsrBleuResult res = AsrBleu(m, toy.data.eval, asr, cfg);
  CHECK_FALSE(res.score.has_value());
  CHECK(res.coverage == 0.0);
  CHECK_FALSE(res.undefined_reason.empty());
  for (const auto& row : res.rows) CHECK_FALSE(row.ok);
}

TEST_CASE("random model evaluation is near chance and well formed") {
  const ToyFixture& toy = Toy();
  const auto m = toy.Model(11);
  EvalConfig cfg;
  cfg.decode.max_len = 10;
  const EvalReport report = Evaluate(m, toy.data.eval, cfg);
  REQUIRE(report.s_per.has_value());
  CHECK(*report.s_per >= 0.8);
  CHECK(report.num_utterances == static_cast<int64_t>(toy.data.eval.records.size()));
  CHECK(report.spec_l1.has_value());
  CHECK(report.tp_bleu >= 0.0);
  CHECK(report.tp_bleu <= 100.0);

  // Totals follow from the rows, also after a JSON round trip.
  EvalReport reread = EvalReport::FromJson(nlohmann::json::parse(report.ToJson().dump()));
  RecomputeTotals(reread);
  CHECK(reread.s_per == report.s_per);
  CHECK(reread.tp_bleu == report.tp_bleu);
  CHECK(reread.spec_l1 == report.spec_l1);
  CHECK(reread.ToJson() == report.ToJson());

  // Corpus PER from the rows equals an independent per-row recomputation.
  int64_t edits = 0, len = 0;
  std::vector<std::string> hyps, refs;
  for (const auto& row : report.rows) {
    edits += testing::EnumerateEditPaths(row.src_ref, row.src_hyp);
    len += static_cast<int64_t>(row.src_ref.size());
    std::string h, r;
    for (auto id : row.tgt_hyp) h += std::to_string(id) + " ";
    for (auto id : row.tgt_ref) r += std::to_string(id) + " ";
    hyps.push_back(h);
    refs.push_back(r);
  }
  CHECK(*report.s_per == doctest::Approx(static_cast<double>(edits) / len));
  CHECK(report.tp_bleu == doctest::Approx(CorpusBleu(hyps, refs, BleuMode::kPhone)));
  CHECK(report.Table("eval").find("S-PER") != std::string::npos);
}

TEST_CASE("evaluating the same model twice gives identical reports") {
  const ToyFixture& toy = Toy();
  const auto m = toy.Model(4);
  EvalConfig cfg;
  cfg.decode.mode = DecodeConfig::Mode::kBeam;
  cfg.decode.beam_size = 2;
  cfg.decode.max_len = 8;
  const std::string a = Evaluate(m, toy.data.eval, cfg).ToJson().dump();
  const std::string b = Evaluate(m, toy.data.eval, cfg).ToJson().dump();
  CHECK(a == b);
}

TEST_CASE("prompt policy resolution") {
  model::ModelConfig c = model::ModelConfig::GradCheck();
  c.prompt_enabled = false;
  const model::Translatotron plain(c, 1);
  c.prompt_enabled = true;
  const model::Translatotron prompted(c, 1);
  CHECK_FALSE(ResolvePrompt(PromptPolicy::kAuto, plain, data::Category::kSecondary).has_value());
  CHECK(ResolvePrompt(PromptPolicy::kAuto, prompted, data::Category::kSecondary) ==
        model::PromptCategory::kSecondary);
  CHECK(ResolvePrompt(PromptPolicy::kPrimary, prompted, data::Category::kSecondary) ==
        model::PromptCategory::kPrimary);
  CHECK(ParsePromptPolicy("category") == PromptPolicy::kCategory);
  CHECK_THROWS_AS(ParsePromptPolicy("sometimes"), ConfigError);
}
