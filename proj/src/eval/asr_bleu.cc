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

#include "s2st/eval/asr_bleu.h"

#include <algorithm>

#include "s2st/audio/griffin_lim.h"
#include "s2st/audio/mel_io.h"
#include "s2st/audio/wav_io.h"
#include "s2st/common/error.h"
#include "s2st/nd/tensor.h"
#include "s2st/train/dataset.h"

namespace s2st::eval {

nlohmann::ordered_json AsrBleuResult::ToJson() const {
  nlohmann::ordered_json j;
  j["score"] = score.has_value() ? nlohmann::ordered_json(*score) : nlohmann::ordered_json();
  j["coverage"] = coverage;
  if (!undefined_reason.empty()) j["undefined_reason"] = undefined_reason;
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const AsrBleuRow& r : rows) {
    nlohmann::ordered_json row;
    row["id"] = r.id;
    row["reference"] = r.reference;
    row["wav"] = r.wav;
    row["mel"] = r.mel;
    row["ok"] = r.ok;
    row["transcript"] = r.transcript;
    if (!r.ok) row["error"] = r.error;
    row["frames"] = r.frames;
    row["stopped_early"] = r.stopped_early;
    rows_json.push_back(std::move(row));
  }
  j["rows"] = std::move(rows_json);
  return j;
}

int DefaultMaxSteps(const model::ModelConfig& config, int64_t src_frames) {
  const int64_t r = config.reduction_factor;
  return static_cast<int>(2 * ((src_frames + r - 1) / r) + 8);
}

AsrBleuResult AsrBleu(const model::Translatotron& model, const data::CorpusManifest& manifest,
                      data::Client& asr, const AsrBleuConfig& cfg) {
  cfg.frontend.Validate();
  if (cfg.out_dir.empty()) throw ConfigError("asr_bleu.out_dir: must be set");
  std::filesystem::create_directories(cfg.out_dir);
  const std::vector<train::Example> examples = train::LoadExamples(manifest, false);

  AsrBleuResult result;
  std::vector<data::ClientRequest> requests;
  for (size_t i = 0; i < examples.size(); ++i) {
    const train::Example& e = examples[i];
    AsrBleuRow row;
    row.id = e.id;
    row.reference = manifest.records[i].tgt_text;
    row.wav = (cfg.out_dir / (e.id + ".wav")).string();
    row.mel = (cfg.out_dir / (e.id + ".mel")).string();
    try {
      nd::NoGradGuard no_grad;
      model::RunContext ctx = model::RunContext::Inference();
      const model::EncoderStates enc =
          model.Encode(train::NormalizedSource(model, e.src),
                       ResolvePrompt(cfg.prompt, model, e.category), ctx);
      const int max_steps =
          cfg.max_steps > 0 ? cfg.max_steps : DefaultMaxSteps(model.config(), e.src.num_frames);
      const model::InferenceResult inf = model.InferSpectrogram(enc, cfg.stop_threshold, max_steps);
      row.frames = inf.num_frames;
      row.stopped_early = inf.stopped_early;
      const audio::MelSpectrogram mel = train::DenormalizeTarget(
          model, inf.mel, inf.num_frames, cfg.frontend.sample_rate, cfg.frontend.hop_length);
      audio::WriteMel(row.mel, mel);
      audio::WriteWav(row.wav, audio::GriffinLimInvert(mel, cfg.frontend,
                                                       cfg.griffin_lim_iterations),
                      audio::WavEncoding::kFloat32);
      requests.push_back({e.id, data::ClientTask::kAsr, "", row.wav});
    } catch (const Error& err) {
      row.error = std::string("synthesis: ") + err.what();
    }
    result.rows.push_back(std::move(row));
  }

  const std::vector<data::ClientResponse> responses = data::RunCorrelated(asr, requests);
  size_t next = 0;
  std::vector<std::string> hyps, refs;
  for (AsrBleuRow& row : result.rows) {
    if (!row.error.empty()) continue;
    const data::ClientResponse& resp = responses[next++];
    row.ok = resp.ok;
    if (resp.ok) {
      row.transcript = resp.text;
      hyps.push_back(row.transcript);
      refs.push_back(row.reference);
    } else {
      row.error = "asr: " + resp.err;
    }
  }
  if (result.rows.empty()) {
    result.undefined_reason = "empty manifest";
  } else {
    result.coverage = static_cast<double>(hyps.size()) / static_cast<double>(result.rows.size());
    if (hyps.empty()) {
      result.undefined_reason = "no utterance was transcribed";
    } else {
      result.score = CorpusBleu(hyps, refs, cfg.bleu_mode);
    }
  }
  return result;
}

}  // namespace s2st::eval
