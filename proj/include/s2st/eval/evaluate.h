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

#ifndef S2ST_EVAL_EVALUATE_H_
#define S2ST_EVAL_EVALUATE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2st/data/client.h"
#include "s2st/data/manifest.h"
#include "s2st/eval/asr_bleu.h"
#include "s2st/eval/decode.h"
#include "s2st/eval/metrics.h"
#include "s2st/model/translatotron.h"

namespace s2st::eval {

struct EvalConfig {
  DecodeConfig decode;
  PromptPolicy prompt = PromptPolicy::kAuto;
  // Teacher-forced spectrogram L1 against the target features.
  bool spectrogram_l1 = true;
  // ASR-BLEU runs only when a client is passed to Evaluate.
  AsrBleuConfig asr;

  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  uint64_t Fingerprint() const;
};

struct EvalRow {
  std::string id;
  data::Category category = data::Category::kPrimary;
  std::vector<int64_t> src_ref, src_hyp;
  std::vector<int64_t> tgt_ref, tgt_hyp;
  EditCounts src_edits;
  BleuStats tgt_bleu;
  // Summed absolute error and element count of the post-net output over the
  // unpadded target frames. Zero count when not computed.
  double spec_abs_error = 0.0;
  int64_t spec_count = 0;
};

struct EvalReport {
  uint64_t model_fingerprint = 0;   // model config
  uint64_t weights_fingerprint = 0; // serialized parameters and buffers
  uint64_t config_fingerprint = 0;
  int64_t num_utterances = 0;
  // Undefined (absent) when every source reference is empty.
  std::optional<double> s_per;
  double tp_bleu = 0.0;
  std::optional<double> spec_l1;
  std::optional<AsrBleuResult> asr;
  std::vector<EvalRow> rows;

  nlohmann::ordered_json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
  // Human-readable summary table.
  std::string Table(const std::string& set_name) const;
};

// Corpus metrics pooled from the rows: PER from summed edit operations over
// summed reference length, BLEU from summed n-gram statistics, L1 from summed
// absolute error.
void RecomputeTotals(EvalReport& report);

// Phone ids rendered as BLEU tokens.
std::vector<std::string> PhoneTokens(std::span<const int64_t> ids);

// Decodes every record with both auxiliary decoders and scores them; runs
// ASR-BLEU when `asr` is non-null. Deterministic for a fixed model, manifest
// and config.
EvalReport Evaluate(const model::Translatotron& model, const data::CorpusManifest& manifest,
                    const EvalConfig& cfg, data::Client* asr = nullptr);

// Writes <stem>.json and <stem>.txt.
void WriteReport(const EvalReport& report, const std::filesystem::path& stem,
                 const std::string& set_name);

}  // namespace s2st::eval

#endif  // S2ST_EVAL_EVALUATE_H_
