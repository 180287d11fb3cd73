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

#ifndef S2ST_DATA_PIPELINE_H_
#define S2ST_DATA_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "s2st/audio/mel.h"
#include "s2st/data/client.h"
#include "s2st/data/manifest.h"
#include "s2st/data/phonemize.h"

namespace s2st::data {

inline constexpr std::string_view kFlagPrepareFailed = "prepare_failed";

// Sends every record's src_text to the MT client. Successful records get
// tgt_text and tgt_text_origin=pseudo; failed ones are flagged
// synthesis_failed and translation_failed with an empty tgt_text. Order is
// preserved.
CorpusManifest PseudoTranslate(const CorpusManifest& manifest, Client& mt);

// Sends tgt_text of records without target audio to the TTS client and
// stores the returned path (relative to the manifest directory when it lies
// under it). Records with empty tgt_text are flagged synthesis_failed
// without a request; records that already have audio or are flagged are left
// alone, so a rerun is a no-op.
CorpusManifest SynthesizeTargets(const CorpusManifest& manifest, Client& tts);

struct FilterRule {
  enum class Kind { kCodeSwitch, kSynthesisFailed, kMaxDuration, kEmptyText, kPrepareFailed };
  Kind kind = Kind::kEmptyText;
  std::string src_charset;
  std::string tgt_charset;
  double max_seconds = 0.0;

  static FilterRule CodeSwitch(std::string src_charset, std::string tgt_charset);
  static FilterRule SynthesisFailed() { return {Kind::kSynthesisFailed, "", "", 0.0}; }
  static FilterRule MaxDuration(double seconds) { return {Kind::kMaxDuration, "", "", seconds}; }
  static FilterRule EmptyText() { return {Kind::kEmptyText, "", "", 0.0}; }
  static FilterRule PrepareFailed() { return {Kind::kPrepareFailed, "", "", 0.0}; }

  std::string Name() const;
  // Throws ConfigError for overlapping charsets or a non-positive duration.
  void Validate() const;
  bool Violated(const UtteranceRecord& r) const;
};

// True when `text` holds characters of both charsets.
bool IsCodeSwitched(const std::string& text, const std::string& charset_a,
                    const std::string& charset_b);

struct FilterResult {
  CorpusManifest kept;
  CorpusManifest dropped;
};

// Splits the manifest by the first violated rule, which is recorded in the
// dropped record's drop_reason. Both outputs keep input order and role.
FilterResult FilterCorpus(const CorpusManifest& manifest, const std::vector<FilterRule>& rules);

// max(1, round(n_secondary / n_primary)).
int UpsampleFactor(size_t n_primary, size_t n_secondary);

// Primary records repeated UpsampleFactor times (the first copy keeps its id,
// copy k > 0 gets "#k" appended) plus secondary records once, shuffled with
// `seed`. Empty primary raises ContractError.
CorpusManifest MixUpsample(const CorpusManifest& primary, const CorpusManifest& secondary,
                           uint64_t seed);

struct PrepareOptions {
  audio::FrontendConfig src_frontend = audio::FrontendConfig::ForSampleRate(8000);
  audio::FrontendConfig tgt_frontend = audio::FrontendConfig::ForSampleRate(24000);
  Lexicon src_lexicon;
  Lexicon tgt_lexicon;
  PhoneInventory src_inventory;
  PhoneInventory tgt_inventory;
  PhonemizeOptions phonemize;
  // Mel files are written here as <id>.src.mel / <id>.tgt.mel.
  std::filesystem::path feature_dir;
};

// Resamples source audio to the source frontend rate, extracts log-mels for
// source and (when present) target audio, and phonemizes both texts. A
// record that cannot be prepared is flagged prepare_failed with the reason
// in drop_reason and otherwise left unchanged.
CorpusManifest PrepareFeatures(const CorpusManifest& manifest, const PrepareOptions& options);

}  // namespace s2st::data

#endif  // S2ST_DATA_PIPELINE_H_
