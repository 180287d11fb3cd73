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

#ifndef S2ST_EVAL_ASR_BLEU_H_
#define S2ST_EVAL_ASR_BLEU_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2st/audio/mel.h"
#include "s2st/data/client.h"
#include "s2st/data/manifest.h"
#include "s2st/eval/decode.h"
#include "s2st/eval/metrics.h"
#include "s2st/model/translatotron.h"

namespace s2st::eval {

struct AsrBleuConfig {
  // Frontend of the target speech; sets the vocoder sample rate and hop.
  audio::FrontendConfig frontend = audio::FrontendConfig::ForSampleRate(24000);
  double stop_threshold = 0.5;
  // Decoder step cap; 0 derives it from the source length.
  int max_steps = 0;
  int griffin_lim_iterations = 32;
  BleuMode bleu_mode = BleuMode::kWordCiDetok;
  PromptPolicy prompt = PromptPolicy::kAuto;
  // Generated <id>.wav and <id>.mel files land here.
  std::filesystem::path out_dir;
};

struct AsrBleuRow {
  std::string id;
  std::string reference;
  std::string wav;  // path of the vocoded prediction
  std::string mel;
  bool ok = false;
  std::string transcript;
  std::string error;
  int64_t frames = 0;
  bool stopped_early = false;
};

struct AsrBleuResult {
  std::vector<AsrBleuRow> rows;
  // Set when at least one utterance was transcribed.
  std::optional<double> score;
  std::string undefined_reason;
  double coverage = 0.0;  // transcribed / total

  nlohmann::ordered_json ToJson() const;
};

// Default decoder step cap for a source of `src_frames` frames.
int DefaultMaxSteps(const model::ModelConfig& config, int64_t src_frames);

// Synthesizes every record of `manifest`, vocodes it with Griffin-Lim, sends
// the audio to `asr` and scores the transcripts against tgt_text. Client
// failures are kept as failed rows; BLEU covers the successes only.
AsrBleuResult AsrBleu(const model::Translatotron& model, const data::CorpusManifest& manifest,
                      data::Client& asr, const AsrBleuConfig& cfg);

}  // namespace s2st::eval

#endif  // S2ST_EVAL_ASR_BLEU_H_
