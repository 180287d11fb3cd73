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

#include "s2st/eval/evaluate.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/nd/tensor.h"
#include "s2st/train/dataset.h"

namespace s2st::eval {

using nlohmann::ordered_json;

namespace {

std::string Hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

uint64_t ParseHex(const std::string& s) { return std::stoull(s, nullptr, 16); }

ordered_json OptionalNumber(const std::optional<double>& v) {
  return v.has_value() ? ordered_json(*v) : ordered_json();
}

std::optional<double> ReadOptional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

ordered_json StatsToJson(const BleuStats& s) {
  return {{"matches", s.matches}, {"totals", s.totals}, {"hyp_len", s.hyp_len},
          {"ref_len", s.ref_len}};
}

BleuStats StatsFromJson(const nlohmann::json& j) {
  BleuStats s;
  s.matches = j.at("matches").get<std::array<int64_t, 4>>();
  s.totals = j.at("totals").get<std::array<int64_t, 4>>();
  s.hyp_len = j.at("hyp_len").get<int64_t>();
  s.ref_len = j.at("ref_len").get<int64_t>();
  return s;
}

// Mean absolute error of the post-net output over the real target frames.
void SpectrogramError(const model::Translatotron& model, const model::EncoderStates& enc,
                      const audio::MelSpectrogram& tgt, EvalRow& row) {
  nd::NoGradGuard no_grad;
  model::RunContext ctx = model::RunContext::Inference();
  const nd::Tensor target = train::NormalizedTarget(model, tgt);
  const model::DecoderOutput out = model.DecodeSpectrogram(enc, target, ctx);
  const auto pred = out.mel_after.data();
  const auto ref = target.data();
  const int64_t n = tgt.num_frames * audio::kNumMels;
  double sum = 0.0;
  for (int64_t i = 0; i < n; ++i) sum += std::fabs(pred[i] - ref[i]);
  row.spec_abs_error = sum;
  row.spec_count = n;
}

}  // namespace

void EvalConfig::Validate() const { decode.Validate(); }

ordered_json EvalConfig::ToJson() const {
  return {{"decode",
           {{"mode", decode.mode == DecodeConfig::Mode::kGreedy ? "greedy" : "beam"},
            {"beam_size", decode.beam_size},
            {"max_len", decode.max_len},
            {"length_penalty", decode.length_penalty}}},
          {"prompt", PromptPolicyName(prompt)},
          {"spectrogram_l1", spectrogram_l1},
          {"asr",
           {{"sample_rate", asr.frontend.sample_rate},
            {"stop_threshold", asr.stop_threshold},
            {"max_steps", asr.max_steps},
            {"griffin_lim_iterations", asr.griffin_lim_iterations},
            {"bleu_mode", BleuModeName(asr.bleu_mode)},
            {"prompt", PromptPolicyName(asr.prompt)}}}};
}

uint64_t EvalConfig::Fingerprint() const { return Fnv1a64(ToJson().dump()); }

std::vector<std::string> PhoneTokens(std::span<const int64_t> ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int64_t id : ids) out.push_back(std::to_string(id));
  return out;
}

void RecomputeTotals(EvalReport& report) {
  report.num_utterances = static_cast<int64_t>(report.rows.size());
  int64_t edits = 0, ref_len = 0, spec_count = 0;
  double spec_error = 0.0;
  BleuStats bleu;
  for (const EvalRow& r : report.rows) {
    edits += r.src_edits.distance();
    ref_len += static_cast<int64_t>(r.src_ref.size());
    bleu += r.tgt_bleu;
    spec_error += r.spec_abs_error;
    spec_count += r.spec_count;
  }
  report.s_per = ref_len > 0 ? std::optional<double>(static_cast<double>(edits) / ref_len)
                             : std::nullopt;
  report.tp_bleu = report.rows.empty() ? 0.0 : BleuFromStats(bleu);
  report.spec_l1 = spec_count > 0 ? std::optional<double>(spec_error / spec_count)
                                  : std::nullopt;
}

EvalReport Evaluate(const model::Translatotron& model, const data::CorpusManifest& manifest,
                    const EvalConfig& cfg, data::Client* asr) {
  cfg.Validate();
  const std::vector<train::Example> examples = train::LoadExamples(manifest, false);
  EvalReport report;
  report.model_fingerprint = model.config().Fingerprint();
  report.config_fingerprint = cfg.Fingerprint();
  {
    ByteWriter weights;
    model.params().SerializeTo(weights);
    report.weights_fingerprint = Fnv1a64(weights.bytes());
  }
  for (const train::Example& e : examples) {
    EvalRow row;
    row.id = e.id;
    row.category = e.category;
    row.src_ref = e.src_phones;
    row.tgt_ref = e.tgt_phones;
    model::RunContext ctx = model::RunContext::Inference();
    nd::NoGradGuard no_grad;
    const model::EncoderStates enc = model.Encode(
        train::NormalizedSource(model, e.src), ResolvePrompt(cfg.prompt, model, e.category), ctx);
    row.src_hyp = DecodePhonemes(model, enc, model::AuxTask::kSource, cfg.decode);
    row.tgt_hyp = DecodePhonemes(model, enc, model::AuxTask::kTarget, cfg.decode);
    row.src_edits = AlignSequences(row.src_ref, row.src_hyp);
    row.tgt_bleu = SegmentBleuStats(PhoneTokens(row.tgt_hyp), PhoneTokens(row.tgt_ref));
    if (cfg.spectrogram_l1 && e.tgt.num_frames > 0) SpectrogramError(model, enc, e.tgt, row);
    report.rows.push_back(std::move(row));
  }
  RecomputeTotals(report);
  if (asr != nullptr) {
    AsrBleuConfig asr_cfg = cfg.asr;
    report.asr = AsrBleu(model, manifest, *asr, asr_cfg);
  }
  return report;
}

ordered_json EvalReport::ToJson() const {
  ordered_json j;
  j["model_fingerprint"] = Hex(model_fingerprint);
  j["weights_fingerprint"] = Hex(weights_fingerprint);
  j["config_fingerprint"] = Hex(config_fingerprint);
  j["num_utterances"] = num_utterances;
  j["s_per"] = OptionalNumber(s_per);
  j["tp_bleu"] = tp_bleu;
  j["spec_l1"] = OptionalNumber(spec_l1);
  j["asr"] = asr.has_value() ? asr->ToJson() : ordered_json();
  ordered_json rows_json = ordered_json::array();
  for (const EvalRow& r : rows) {
    rows_json.push_back({{"id", r.id},
                         {"category", data::CategoryName(r.category)},
                         {"src_ref", r.src_ref},
                         {"src_hyp", r.src_hyp},
                         {"tgt_ref", r.tgt_ref},
                         {"tgt_hyp", r.tgt_hyp},
                         {"src_edits",
                          {{"sub", r.src_edits.substitutions},
                           {"ins", r.src_edits.insertions},
                           {"del", r.src_edits.deletions}}},
                         {"tgt_bleu", StatsToJson(r.tgt_bleu)},
                         {"spec_abs_error", r.spec_abs_error},
                         {"spec_count", r.spec_count}});
  }
  j["rows"] = std::move(rows_json);
  return j;
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.model_fingerprint = ParseHex(j.at("model_fingerprint").get<std::string>());
    r.weights_fingerprint = ParseHex(j.at("weights_fingerprint").get<std::string>());
    r.config_fingerprint = ParseHex(j.at("config_fingerprint").get<std::string>());
    r.num_utterances = j.at("num_utterances").get<int64_t>();
    r.s_per = ReadOptional(j, "s_per");
    r.tp_bleu = j.at("tp_bleu").get<double>();
    r.spec_l1 = ReadOptional(j, "spec_l1");
    for (const auto& row_json : j.at("rows")) {
      EvalRow row;
      row.id = row_json.at("id").get<std::string>();
      row.category = data::ParseCategory(row_json.at("category").get<std::string>());
      row.src_ref = row_json.at("src_ref").get<std::vector<int64_t>>();
      row.src_hyp = row_json.at("src_hyp").get<std::vector<int64_t>>();
      row.tgt_ref = row_json.at("tgt_ref").get<std::vector<int64_t>>();
      row.tgt_hyp = row_json.at("tgt_hyp").get<std::vector<int64_t>>();
      const auto& e = row_json.at("src_edits");
      row.src_edits = {e.at("sub").get<int64_t>(), e.at("ins").get<int64_t>(),
                       e.at("del").get<int64_t>()};
      row.tgt_bleu = StatsFromJson(row_json.at("tgt_bleu"));
      row.spec_abs_error = row_json.at("spec_abs_error").get<double>();
      row.spec_count = row_json.at("spec_count").get<int64_t>();
      r.rows.push_back(std::move(row));
    }
    // ASR rows are kept only in the JSON form.
    if (j.contains("asr") && !j.at("asr").is_null()) {
      AsrBleuResult asr;
      asr.score = ReadOptional(j.at("asr"), "score");
      asr.coverage = j.at("asr").at("coverage").get<double>();
      if (j.at("asr").contains("undefined_reason")) {
        asr.undefined_reason = j.at("asr").at("undefined_reason").get<std::string>();
      }
      r.asr = std::move(asr);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("eval report: ") + e.what());
  }
}

std::string EvalReport::Table(const std::string& set_name) const {
  auto fmt = [](const std::optional<double>& v, const char* spec) {
    if (!v.has_value()) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof(buf), spec, *v);
    return std::string(buf);
  };
  const std::optional<double> asr_score =
      asr.has_value() ? asr->score : std::optional<double>();
  char line[256];
  std::string out;
  std::snprintf(line, sizeof(line), "%-12s %8s %8s %9s %9s %8s %6s\n", "set", "S-PER",
                "Tp-BLEU", "ASR-BLEU", "coverage", "spec-L1", "n");
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %8s %8s %9s %9s %8s %6lld\n", set_name.c_str(),
                fmt(s_per, "%.4f").c_str(), fmt(tp_bleu, "%.2f").c_str(),
                fmt(asr_score, "%.2f").c_str(),
                fmt(asr.has_value() ? std::optional<double>(asr->coverage) : std::nullopt, "%.3f")
                    .c_str(),
                fmt(spec_l1, "%.4f").c_str(), static_cast<long long>(num_utterances));
  out += line;
  if (asr.has_value() && !asr->undefined_reason.empty()) {
    out += "ASR-BLEU undefined: " + asr->undefined_reason + "\n";
  }
  out += "model " + Hex(model_fingerprint) + "  weights " + Hex(weights_fingerprint) +
         "  config " + Hex(config_fingerprint) + "\n";
  return out;
}

void WriteReport(const EvalReport& report, const std::filesystem::path& stem,
                 const std::string& set_name) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::filesystem::path json_path = stem;
  json_path += ".json";
  std::filesystem::path txt_path = stem;
  txt_path += ".txt";
  WriteFileBytes(json_path, report.ToJson().dump(2) + "\n");
  WriteFileBytes(txt_path, report.Table(set_name));
}

}  // namespace s2st::eval
