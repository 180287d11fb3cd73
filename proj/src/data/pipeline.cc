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

#include "s2st/data/pipeline.h"

#include <cmath>

#include "s2st/audio/mel_io.h"
#include "s2st/audio/resample.h"
#include "s2st/audio/wav_io.h"
#include "s2st/common/error.h"
#include "s2st/common/random.h"

namespace s2st::data {

namespace {

std::string StoredPath(const std::filesystem::path& path, const CorpusManifest& m) {
  return m.base_dir.empty() ? path.string() : RelativeTo(path, m.base_dir);
}

bool HasAnyChar(const std::string& text, const std::string& charset) {
  return text.find_first_of(charset) != std::string::npos;
}

bool Blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

CorpusManifest PseudoTranslate(const CorpusManifest& manifest, Client& mt) {
  std::vector<ClientRequest> requests;
  requests.reserve(manifest.records.size());
  for (const UtteranceRecord& r : manifest.records) {
    requests.push_back({r.id, ClientTask::kMt, r.src_text, ""});
  }
  const std::vector<ClientResponse> responses = RunCorrelated(mt, requests);
  CorpusManifest out = manifest;
  for (size_t i = 0; i < out.records.size(); ++i) {
    UtteranceRecord& r = out.records[i];
    r.tgt_text_origin = Origin::kPseudo;
    if (responses[i].ok) {
      r.tgt_text = responses[i].text;
    } else {
      r.tgt_text.clear();
      r.AddFlag(kFlagTranslationFailed);
      r.AddFlag(kFlagSynthesisFailed);
    }
  }
  return out;
}

CorpusManifest SynthesizeTargets(const CorpusManifest& manifest, Client& tts) {
  CorpusManifest out = manifest;
  std::vector<ClientRequest> requests;
  std::vector<size_t> slots;
  for (size_t i = 0; i < out.records.size(); ++i) {
    UtteranceRecord& r = out.records[i];
    if (!r.tgt_audio.empty() || r.HasFlag(kFlagSynthesisFailed)) continue;
    if (Blank(r.tgt_text)) {
      r.AddFlag(kFlagSynthesisFailed);
      continue;
    }
    requests.push_back({r.id, ClientTask::kTts, r.tgt_text, ""});
    slots.push_back(i);
  }
  if (requests.empty()) return out;
  const std::vector<ClientResponse> responses = RunCorrelated(tts, requests);
  for (size_t k = 0; k < slots.size(); ++k) {
    UtteranceRecord& r = out.records[slots[k]];
    if (responses[k].ok && !responses[k].audio.empty()) {
      r.tgt_audio = StoredPath(responses[k].audio, out);
      r.tgt_audio_origin = Origin::kPseudo;
    } else {
      r.AddFlag(kFlagSynthesisFailed);
    }
  }
  return out;
}

FilterRule FilterRule::CodeSwitch(std::string src_charset, std::string tgt_charset) {
  return {Kind::kCodeSwitch, std::move(src_charset), std::move(tgt_charset), 0.0};
}

std::string FilterRule::Name() const {
  switch (kind) {
    case Kind::kCodeSwitch: return "code_switch";
    case Kind::kSynthesisFailed: return "synthesis_failed";
    case Kind::kMaxDuration: return "max_duration";
    case Kind::kEmptyText: return "empty_text";
    case Kind::kPrepareFailed: return "prepare_failed";
  }
  return "?";
}

void FilterRule::Validate() const {
  if (kind == Kind::kCodeSwitch) {
    if (src_charset.empty() || tgt_charset.empty()) {
      throw ConfigError("filter.code_switch: charsets must be non-empty");
    }
    if (HasAnyChar(src_charset, tgt_charset)) {
      throw ConfigError("filter.code_switch: charsets must be disjoint");
    }
  }
  if (kind == Kind::kMaxDuration && !(max_seconds > 0)) {
    throw ConfigError("filter.max_duration: seconds must be positive");
  }
}

bool IsCodeSwitched(const std::string& text, const std::string& charset_a,
                    const std::string& charset_b) {
  return HasAnyChar(text, charset_a) && HasAnyChar(text, charset_b);
}

bool FilterRule::Violated(const UtteranceRecord& r) const {
  switch (kind) {
    case Kind::kCodeSwitch:
      return IsCodeSwitched(r.src_text, src_charset, tgt_charset) ||
             IsCodeSwitched(r.tgt_text, src_charset, tgt_charset);
    case Kind::kSynthesisFailed:
      return r.HasFlag(kFlagSynthesisFailed);
    case Kind::kMaxDuration:
      return r.src_duration > max_seconds;
    case Kind::kEmptyText:
      return Blank(r.src_text) || Blank(r.tgt_text);
    case Kind::kPrepareFailed:
      return r.HasFlag(kFlagPrepareFailed);
  }
  return false;
}

FilterResult FilterCorpus(const CorpusManifest& manifest, const std::vector<FilterRule>& rules) {
  for (const FilterRule& rule : rules) rule.Validate();
  FilterResult result;
  result.kept.role = result.dropped.role = manifest.role;
  result.kept.base_dir = result.dropped.base_dir = manifest.base_dir;
  for (const UtteranceRecord& r : manifest.records) {
    const FilterRule* hit = nullptr;
    for (const FilterRule& rule : rules) {
      if (rule.Violated(r)) {
        hit = &rule;
        break;
      }
    }
    if (hit == nullptr) {
      result.kept.records.push_back(r);
    } else {
      result.dropped.records.push_back(r);
      result.dropped.records.back().drop_reason = hit->Name();
    }
  }
  return result;
}

int UpsampleFactor(size_t n_primary, size_t n_secondary) {
  if (n_primary == 0) throw ContractError("upsampling: empty primary set");
  const double ratio = static_cast<double>(n_secondary) / static_cast<double>(n_primary);
  return std::max(1, static_cast<int>(std::lround(ratio)));
}

CorpusManifest MixUpsample(const CorpusManifest& primary, const CorpusManifest& secondary,
                           uint64_t seed) {
  if (primary.records.empty()) throw ContractError("mix_upsample: empty primary manifest");
  if (secondary.records.empty()) throw ContractError("mix_upsample: empty secondary manifest");
  const int d = UpsampleFactor(primary.records.size(), secondary.records.size());
  CorpusManifest out;
  out.role = Role::kMixed;
  out.base_dir = primary.base_dir;
  for (const UtteranceRecord& r : primary.records) {
    for (int k = 0; k < d; ++k) {
      out.records.push_back(r);
      if (k > 0) out.records.back().id += "#" + std::to_string(k);
    }
  }
  const bool rebase = !secondary.base_dir.empty() && secondary.base_dir != primary.base_dir;
  for (UtteranceRecord r : secondary.records) {
    if (rebase) {
      // Keep paths valid relative to the mixed manifest's directory.
      for (std::string* p : {&r.src_audio, &r.tgt_audio, &r.src_mel, &r.tgt_mel}) {
        if (!p->empty()) *p = StoredPath(secondary.Resolve(*p), out);
      }
    }
    out.records.push_back(std::move(r));
  }
  Rng rng(DeriveSeed(seed, {0x6d6978}));
  rng.Shuffle(out.records);
  out.Validate();
  return out;
}

CorpusManifest PrepareFeatures(const CorpusManifest& manifest, const PrepareOptions& options) {
  options.src_frontend.Validate();
  options.tgt_frontend.Validate();
  if (options.feature_dir.empty()) throw ConfigError("prepare: feature_dir is empty");
  std::filesystem::create_directories(options.feature_dir);
  CorpusManifest out = manifest;
  for (UtteranceRecord& r : out.records) {
    try {
      audio::Waveform src = audio::ReadWav(manifest.Resolve(r.src_audio));
      r.src_sr = src.sample_rate;
      if (src.sample_rate != options.src_frontend.sample_rate) {
        src = audio::Resample(src, options.src_frontend.sample_rate);
      }
      r.src_duration = src.duration_seconds();
      audio::MelSpectrogram src_mel = audio::ComputeMelSpectrogram(src, options.src_frontend);
      src_mel.origin = audio::MelOrigin::kSource;
      const auto src_path = options.feature_dir / (r.id + ".src.mel");
      audio::WriteMel(src_path, src_mel);
      r.src_mel = StoredPath(src_path, out);
      r.src_frames = src_mel.num_frames;
      r.src_phones = Phonemize(r.src_text, options.src_lexicon, options.phonemize,
                               options.src_inventory);
      if (!Blank(r.tgt_text)) {
        r.tgt_phones = Phonemize(r.tgt_text, options.tgt_lexicon, options.phonemize,
                                 options.tgt_inventory);
      }
      if (!r.tgt_audio.empty()) {
        audio::Waveform tgt = audio::ReadWav(manifest.Resolve(r.tgt_audio));
        if (tgt.sample_rate != options.tgt_frontend.sample_rate) {
          tgt = audio::Resample(tgt, options.tgt_frontend.sample_rate);
        }
        audio::MelSpectrogram tgt_mel = audio::ComputeMelSpectrogram(tgt, options.tgt_frontend);
        tgt_mel.origin = audio::MelOrigin::kTarget;
        const auto tgt_path = options.feature_dir / (r.id + ".tgt.mel");
        audio::WriteMel(tgt_path, tgt_mel);
        r.tgt_mel = StoredPath(tgt_path, out);
        r.tgt_frames = tgt_mel.num_frames;
      }
    } catch (const Error& e) {
      r.AddFlag(kFlagPrepareFailed);
      r.drop_reason = std::string(kFlagPrepareFailed) + ": " + e.what();
    }
  }
  return out;
}

}  // namespace s2st::data
