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

#ifndef S2ST_DATA_TOY_CORPUS_H_
#define S2ST_DATA_TOY_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2st/audio/waveform.h"
#include "s2st/common/random.h"
#include "s2st/data/manifest.h"

namespace s2st::data {

// A phone is rendered as two sinusoids; every phone of an inventory gets a
// distinct (f1, f2) pair so phones separate linearly in log-mel space.
struct PhoneTemplate {
  double f1 = 0.0;
  double f2 = 0.0;
};

// Templates for n source phones; every frequency fits below 4 kHz.
std::vector<PhoneTemplate> SourceTemplates(int n);
// Templates for n target phones; every frequency fits below 8 kHz.
std::vector<PhoneTemplate> TargetTemplates(int n);

struct SynthesisOptions {
  int sample_rate = 8000;
  int samples_per_phone = 320;
  double amplitude = 0.3;
  // Relative per-phone frequency perturbation, uniform in [-j, j].
  double freq_jitter = 0.0;
  // Standard deviation of additive Gaussian noise.
  double noise = 0.0;
};

// Concatenates one template segment per phone index, each faded in and out
// over 5 ms. An rng is required when jitter or noise is non-zero.
audio::Waveform SynthesizePhones(const std::vector<int>& phones,
                                 const std::vector<PhoneTemplate>& templates,
                                 const SynthesisOptions& options, Rng* rng = nullptr);

struct ToySpec {
  int n_primary = 32;
  int n_secondary = 128;
  // Held-out records drawn like primary ones.
  int n_eval = 0;
  std::vector<std::string> src_vocab;
  std::vector<std::string> tgt_vocab;
  std::map<std::string, std::string> mapping_primary;
  std::map<std::string, std::string> mapping_secondary;
  // Primary training records draw their words from the first
  // primary_symbols source symbols only; 0 means all of them. Held-out and
  // secondary records always use the whole vocabulary.
  int primary_symbols = 0;
  int min_len = 3;
  int max_len = 6;
  int frames_per_phone = 4;
  // Primary audio rate; secondary audio is generated at secondary_sr.
  int primary_sr = 8000;
  int secondary_sr = 16000;
  double freq_jitter = 0.01;
  double noise = 0.002;
  uint64_t seed = 1;

  // Eight source phones a..h, target phones A..H, both mappings a->A.
  static ToySpec Default();
  // Secondary mapping is a cyclic shift of the primary one (a->B, ...).
  // Both sets share one sample rate so the mapping cannot be told apart
  // from the audio alone.
  static ToySpec Conflicting();

  // Throws ConfigError naming "toy.<field>".
  void Validate() const;

  nlohmann::ordered_json ToJson() const;
  static ToySpec FromJson(const nlohmann::json& j, const ToySpec& base);
};

struct ToyCorpus {
  CorpusManifest primary;
  CorpusManifest secondary;
  CorpusManifest eval;
  std::filesystem::path primary_manifest;
  std::filesystem::path secondary_manifest;
  std::filesystem::path eval_manifest;
  std::filesystem::path src_lexicon;
  std::filesystem::path tgt_lexicon;
  std::filesystem::path src_inventory;
  std::filesystem::path tgt_inventory;
  std::filesystem::path mt_primary;
  std::filesystem::path mt_secondary;
};

// Writes audio/, primary.jsonl, secondary.jsonl, eval.jsonl (when n_eval >
// 0), lexicons, phone inventories and the word-level MT dictionaries of both
// mappings under out_dir. Fully determined by the spec.
ToyCorpus GenerateToyCorpus(const ToySpec& spec, const std::filesystem::path& out_dir);

// Reopens a corpus written by GenerateToyCorpus, returning its spec through
// `spec` when non-null.
ToyCorpus LoadToyCorpus(const std::filesystem::path& dir, ToySpec* spec = nullptr);

// Maps each word of `text` through `mapping`; unknown words raise VocabError.
std::string MapText(const std::string& text, const std::map<std::string, std::string>& mapping);

// Word-level dictionary stored as a JSON object.
std::map<std::string, std::string> ReadWordMap(const std::filesystem::path& path);
void WriteWordMap(const std::map<std::string, std::string>& map,
                  const std::filesystem::path& path);

std::vector<std::string> SplitWords(const std::string& text);
std::string JoinWords(const std::vector<std::string>& words);

}  // namespace s2st::data

#endif  // S2ST_DATA_TOY_CORPUS_H_
