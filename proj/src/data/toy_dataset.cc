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

#include "s2st/data/toy_dataset.h"

#include <set>

#include "s2st/data/phonemize.h"
#include "s2st/data/toy_clients.h"

namespace s2st::data {

namespace {

std::string Charset(const std::vector<std::string>& symbols) {
  std::set<char> chars;
  for (const std::string& s : symbols) chars.insert(s.begin(), s.end());
  return std::string(chars.begin(), chars.end());
}

}  // namespace

std::vector<FilterRule> ToyFilterRules(const ToySpec& spec) {
  std::vector<FilterRule> rules;
  const std::string src = Charset(spec.src_vocab), tgt = Charset(spec.tgt_vocab);
  if (src.find_first_of(tgt) == std::string::npos) rules.push_back(FilterRule::CodeSwitch(src, tgt));
  rules.push_back(FilterRule::SynthesisFailed());
  rules.push_back(FilterRule::PrepareFailed());
  rules.push_back(FilterRule::EmptyText());
  return rules;
}

PreparedToyData BuildToyDataset(const ToySpec& spec, const std::filesystem::path& dir,
                                Client* mt, Client* tts) {
  return PrepareToyDataset(spec, GenerateToyCorpus(spec, dir), dir, mt, tts);
}

PreparedToyData PrepareToyDataset(const ToySpec& spec, const ToyCorpus& corpus,
                                  const std::filesystem::path& dir, Client* mt, Client* tts) {
  PreparedToyData out;
  out.corpus = corpus;
  ToyMtClient toy_mt(ToyMtMode::kDictionary, ReadWordMap(out.corpus.mt_secondary));
  ToyVoice voice;
  voice.phones = spec.tgt_vocab;
  voice.frames_per_phone = spec.frames_per_phone;
  ToyTtsClient toy_tts(voice, dir / "tts");
  RecordingClient mt_rec(mt ? *mt : toy_mt, dir / "transcripts" / "mt.jsonl");
  RecordingClient tts_rec(tts ? *tts : toy_tts, dir / "transcripts" / "tts.jsonl");

  PrepareOptions prep;
  prep.src_frontend = audio::FrontendConfig::ForSampleRate(spec.primary_sr);
  prep.tgt_frontend = audio::FrontendConfig::ForSampleRate(voice.sample_rate);
  prep.tgt_frontend.hop_length = voice.hop_length;
  prep.src_lexicon = ReadLexicon(out.corpus.src_lexicon);
  prep.tgt_lexicon = ReadLexicon(out.corpus.tgt_lexicon);
  prep.src_inventory = ReadInventory(out.corpus.src_inventory);
  prep.tgt_inventory = ReadInventory(out.corpus.tgt_inventory);
  prep.feature_dir = dir / "features";
  const std::vector<FilterRule> rules = ToyFilterRules(spec);
  out.dropped.role = Role::kMixed;

  const auto run = [&](CorpusManifest m, bool translate) {
    if (m.records.empty()) return m;
    if (translate) m = PseudoTranslate(m, mt_rec);
    m = SynthesizeTargets(m, tts_rec);
    m = PrepareFeatures(m, prep);
    FilterResult f = FilterCorpus(m, rules);
    for (auto& r : f.dropped.records) out.dropped.records.push_back(std::move(r));
    return f.kept;
  };
  out.primary = run(out.corpus.primary, false);
  out.secondary = run(out.corpus.secondary, true);
  out.eval = run(out.corpus.eval, false);
  std::filesystem::create_directories(dir / "prepared");
  WriteManifest(out.primary, dir / "prepared" / "primary.jsonl");
  WriteManifest(out.secondary, dir / "prepared" / "secondary.jsonl");
  if (!out.eval.records.empty()) WriteManifest(out.eval, dir / "prepared" / "eval.jsonl");
  return out;
}

}  // namespace s2st::data
