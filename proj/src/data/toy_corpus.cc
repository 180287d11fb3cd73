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

#include "s2st/data/toy_corpus.h"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "s2st/audio/wav_io.h"
#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"
#include "s2st/data/phonemize.h"

namespace s2st::data {

namespace {

std::vector<PhoneTemplate> Spread(int n, double f1_lo, double f1_hi, double f2_lo,
                                  double f2_hi) {
  std::vector<PhoneTemplate> out(std::max(n, 0));
  for (int i = 0; i < n; ++i) {
    const double u = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
    // f2 runs opposite to f1 so no two phones share a frequency region.
    out[i] = {f1_lo + u * (f1_hi - f1_lo), f2_hi - u * (f2_hi - f2_lo)};
  }
  return out;
}

std::map<std::string, std::string> ZipMap(const std::vector<std::string>& from,
                                          const std::vector<std::string>& to, size_t shift) {
  std::map<std::string, std::string> m;
  for (size_t i = 0; i < from.size(); ++i) m[from[i]] = to[(i + shift) % to.size()];
  return m;
}

[[noreturn]] void Bad(const std::string& field, const std::string& rule) {
  throw ConfigError("toy." + field + ": " + rule);
}

}  // namespace

std::vector<PhoneTemplate> SourceTemplates(int n) { return Spread(n, 300, 1500, 1900, 3500); }

std::vector<PhoneTemplate> TargetTemplates(int n) { return Spread(n, 400, 2000, 3000, 7000); }

audio::Waveform SynthesizePhones(const std::vector<int>& phones,
                                 const std::vector<PhoneTemplate>& templates,
                                 const SynthesisOptions& options, Rng* rng) {
  if (options.sample_rate <= 0 || options.samples_per_phone <= 0) {
    throw InvalidArgumentError("synthesis: non-positive rate or segment length");
  }
  if ((options.freq_jitter > 0 || options.noise > 0) && rng == nullptr) {
    throw ContractError("synthesis: jitter or noise requested without an rng");
  }
  const double nyquist = options.sample_rate / 2.0;
  const int n = options.samples_per_phone;
  const int fade = std::min(n / 2, std::max(1, options.sample_rate / 200));
  audio::Waveform wave;
  wave.sample_rate = options.sample_rate;
  wave.samples.reserve(phones.size() * n);
  for (const int p : phones) {
    if (p < 0 || p >= static_cast<int>(templates.size())) {
      throw VocabError("synthesis: phone index " + std::to_string(p) + " out of range");
    }
    double f1 = templates[p].f1, f2 = templates[p].f2;
    if (options.freq_jitter > 0) {
      f1 *= 1.0 + rng->Uniform(-options.freq_jitter, options.freq_jitter);
      f2 *= 1.0 + rng->Uniform(-options.freq_jitter, options.freq_jitter);
    }
    if (f1 >= nyquist || f2 >= nyquist) {
      throw ContractError("synthesis: template frequency above Nyquist at " +
                          std::to_string(options.sample_rate) + " Hz");
    }
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / options.sample_rate;
      double env = 1.0;
      if (i < fade) env = 0.5 - 0.5 * std::cos(std::numbers::pi * i / fade);
      if (n - 1 - i < fade) env = 0.5 - 0.5 * std::cos(std::numbers::pi * (n - 1 - i) / fade);
      double v = options.amplitude * env *
                 (std::sin(2 * std::numbers::pi * f1 * t) +
                  0.7 * std::sin(2 * std::numbers::pi * f2 * t));
      if (options.noise > 0) v += rng->Normal(0.0, options.noise);
      wave.samples.push_back(static_cast<float>(std::clamp(v, -1.0, 1.0)));
    }
  }
  return wave;
}

ToySpec ToySpec::Default() {
  ToySpec s;
  for (char c = 'a'; c <= 'h'; ++c) s.src_vocab.emplace_back(1, c);
  for (char c = 'A'; c <= 'H'; ++c) s.tgt_vocab.emplace_back(1, c);
  s.mapping_primary = ZipMap(s.src_vocab, s.tgt_vocab, 0);
  s.mapping_secondary = s.mapping_primary;
  return s;
}

ToySpec ToySpec::Conflicting() {
  ToySpec s = Default();
  s.mapping_secondary = ZipMap(s.src_vocab, s.tgt_vocab, 1);
  s.secondary_sr = s.primary_sr;
  return s;
}

void ToySpec::Validate() const {
  if (n_primary < 1) Bad("n_primary", "must be >= 1");
  if (n_secondary < 0) Bad("n_secondary", "must be >= 0");
  if (n_eval < 0) Bad("n_eval", "must be >= 0");
  if (primary_symbols < 0 || primary_symbols > static_cast<int>(src_vocab.size())) {
    Bad("primary_symbols", "must be in [0, |src_vocab|]");
  }
  if (src_vocab.empty()) Bad("src_vocab", "must be non-empty");
  if (tgt_vocab.empty()) Bad("tgt_vocab", "must be non-empty");
  const std::set<std::string> src(src_vocab.begin(), src_vocab.end());
  const std::set<std::string> tgt(tgt_vocab.begin(), tgt_vocab.end());
  if (src.size() != src_vocab.size()) Bad("src_vocab", "contains duplicates");
  if (tgt.size() != tgt_vocab.size()) Bad("tgt_vocab", "contains duplicates");
  for (const std::string& w : src_vocab) {
    if (w.empty() || w.find_first_of(" \t\n") != std::string::npos) {
      Bad("src_vocab", "symbols must be non-empty and contain no whitespace");
    }
    if (tgt.count(w)) Bad("src_vocab", "shares symbol '" + w + "' with tgt_vocab");
  }
  for (const std::string& w : tgt_vocab) {
    if (w.empty() || w.find_first_of(" \t\n") != std::string::npos) {
      Bad("tgt_vocab", "symbols must be non-empty and contain no whitespace");
    }
  }
  const auto check_mapping = [&](const std::map<std::string, std::string>& m,
                                 const std::string& name) {
    std::set<std::string> images;
    for (const std::string& w : src_vocab) {
      const auto it = m.find(w);
      if (it == m.end()) Bad(name, "undefined for source phone '" + w + "'");
      if (!tgt.count(it->second)) Bad(name, "maps to unknown target phone '" + it->second + "'");
      if (!images.insert(it->second).second) Bad(name, "is not injective");
    }
    if (m.size() != src_vocab.size()) Bad(name, "has keys outside src_vocab");
  };
  check_mapping(mapping_primary, "mapping_primary");
  check_mapping(mapping_secondary, "mapping_secondary");
  if (min_len < 1) Bad("min_len", "must be >= 1");
  if (max_len < min_len) Bad("max_len", "must be >= min_len");
  if (frames_per_phone < 1) Bad("frames_per_phone", "must be >= 1");
  if (primary_sr <= 0) Bad("primary_sr", "must be positive");
  if (secondary_sr <= 0) Bad("secondary_sr", "must be positive");
  if (freq_jitter < 0 || freq_jitter >= 0.1) Bad("freq_jitter", "must lie in [0, 0.1)");
  if (noise < 0) Bad("noise", "must be >= 0");
  const auto src_t = SourceTemplates(static_cast<int>(src_vocab.size()));
  const double top = src_t.empty() ? 0.0 : std::max(src_t.front().f2, src_t.back().f1);
  if (top * (1 + freq_jitter) >= std::min(primary_sr, secondary_sr) / 2.0) {
    Bad("primary_sr", "too low for the source phone templates");
  }
}

nlohmann::ordered_json ToySpec::ToJson() const {
  nlohmann::ordered_json j;
  j["n_primary"] = n_primary;
  j["n_secondary"] = n_secondary;
  j["n_eval"] = n_eval;
  j["primary_symbols"] = primary_symbols;
  j["src_vocab"] = src_vocab;
  j["tgt_vocab"] = tgt_vocab;
  j["mapping_primary"] = mapping_primary;
  j["mapping_secondary"] = mapping_secondary;
  j["min_len"] = min_len;
  j["max_len"] = max_len;
  j["frames_per_phone"] = frames_per_phone;
  j["primary_sr"] = primary_sr;
  j["secondary_sr"] = secondary_sr;
  j["freq_jitter"] = freq_jitter;
  j["noise"] = noise;
  j["seed"] = seed;
  return j;
}

ToySpec ToySpec::FromJson(const nlohmann::json& j, const ToySpec& base) {
  if (!j.is_object()) throw ConfigError("toy: expected an object");
  ToySpec s = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "n_primary") s.n_primary = value.get<int>();
      else if (key == "n_secondary") s.n_secondary = value.get<int>();
      else if (key == "n_eval") s.n_eval = value.get<int>();
      else if (key == "primary_symbols") s.primary_symbols = value.get<int>();
      else if (key == "src_vocab") s.src_vocab = value.get<std::vector<std::string>>();
      else if (key == "tgt_vocab") s.tgt_vocab = value.get<std::vector<std::string>>();
      else if (key == "mapping_primary")
        s.mapping_primary = value.get<std::map<std::string, std::string>>();
      else if (key == "mapping_secondary")
        s.mapping_secondary = value.get<std::map<std::string, std::string>>();
      else if (key == "min_len") s.min_len = value.get<int>();
      else if (key == "max_len") s.max_len = value.get<int>();
      else if (key == "frames_per_phone") s.frames_per_phone = value.get<int>();
      else if (key == "primary_sr") s.primary_sr = value.get<int>();
      else if (key == "secondary_sr") s.secondary_sr = value.get<int>();
      else if (key == "freq_jitter") s.freq_jitter = value.get<double>();
      else if (key == "noise") s.noise = value.get<double>();
      else if (key == "seed") s.seed = value.get<uint64_t>();
      else throw ConfigError("toy." + key + ": unknown key");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("toy." + key + ": " + e.what());
    }
  }
  return s;
}

std::vector<std::string> SplitWords(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

std::string MapText(const std::string& text, const std::map<std::string, std::string>& mapping) {
  std::vector<std::string> words = SplitWords(text);
  for (std::string& w : words) {
    const auto it = mapping.find(w);
    if (it == mapping.end()) throw VocabError("no mapping for word '" + w + "'");
    w = it->second;
  }
  return JoinWords(words);
}

std::map<std::string, std::string> ReadWordMap(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(ReadFileBytes(path)).get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteWordMap(const std::map<std::string, std::string>& map,
                  const std::filesystem::path& path) {
  WriteFileBytes(path, nlohmann::json(map).dump(1) + "\n");
}

ToyCorpus GenerateToyCorpus(const ToySpec& spec, const std::filesystem::path& out_dir) {
  spec.Validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "audio");
  const auto templates = SourceTemplates(static_cast<int>(spec.src_vocab.size()));
  const int hop_ms = 10;

  ToyCorpus corpus;
  const auto make = [&](Category category, Role role, int count, const std::string& prefix,
                        uint64_t stream) {
    CorpusManifest m;
    m.role = role;
    m.base_dir = out_dir;
    const bool primary = category == Category::kPrimary;
    const int sr = primary ? spec.primary_sr : spec.secondary_sr;
    const auto& mapping = primary ? spec.mapping_primary : spec.mapping_secondary;
    SynthesisOptions opts;
    opts.sample_rate = sr;
    opts.samples_per_phone = spec.frames_per_phone * sr * hop_ms / 1000;
    opts.freq_jitter = spec.freq_jitter;
    opts.noise = spec.noise;
    const bool restricted = stream == 1 && spec.primary_symbols > 0;
    const int64_t symbols = restricted ? spec.primary_symbols
                                       : static_cast<int64_t>(spec.src_vocab.size());
    for (int i = 0; i < count; ++i) {
      Rng rng(DeriveSeed(spec.seed, {stream, static_cast<uint64_t>(i)}));
      const int len = static_cast<int>(rng.UniformInt(spec.min_len, spec.max_len));
      std::vector<int> phones(len);
      std::vector<std::string> words(len);
      for (int k = 0; k < len; ++k) {
        phones[k] = static_cast<int>(rng.UniformInt(0, symbols - 1));
        words[k] = spec.src_vocab[phones[k]];
      }
      opts.amplitude = rng.Uniform(0.2, 0.35);
      const audio::Waveform wave = SynthesizePhones(phones, templates, opts, &rng);
      char id[32];
      std::snprintf(id, sizeof(id), "%s%05d", prefix.c_str(), i);
      UtteranceRecord r;
      r.id = id;
      r.src_audio = "audio/" + r.id + ".wav";
      audio::WriteWav(out_dir / r.src_audio, wave, audio::WavEncoding::kFloat32);
      r.src_sr = sr;
      r.src_text = JoinWords(words);
      r.tgt_text = MapText(r.src_text, mapping);
      r.tgt_text_origin = primary ? Origin::kReal : Origin::kPseudo;
      r.tgt_audio_origin = Origin::kPseudo;
      r.category = category;
      r.src_duration = wave.duration_seconds();
      m.records.push_back(std::move(r));
    }
    return m;
  };
  corpus.primary = make(Category::kPrimary, Role::kPrimary, spec.n_primary, "p", 1);
  corpus.secondary = make(Category::kSecondary, Role::kSecondary, spec.n_secondary, "s", 2);
  corpus.eval = make(Category::kPrimary, Role::kPrimary, spec.n_eval, "e", 3);

  corpus.primary_manifest = out_dir / "primary.jsonl";
  corpus.secondary_manifest = out_dir / "secondary.jsonl";
  WriteManifest(corpus.primary, corpus.primary_manifest);
  WriteManifest(corpus.secondary, corpus.secondary_manifest);
  if (spec.n_eval > 0) {
    corpus.eval_manifest = out_dir / "eval.jsonl";
    WriteManifest(corpus.eval, corpus.eval_manifest);
  }

  Lexicon src_lex, tgt_lex;
  for (const std::string& w : spec.src_vocab) src_lex[w] = {w};
  for (const std::string& w : spec.tgt_vocab) tgt_lex[w] = {w};
  corpus.src_lexicon = out_dir / "src_lexicon.json";
  corpus.tgt_lexicon = out_dir / "tgt_lexicon.json";
  corpus.src_inventory = out_dir / "src_phones.json";
  corpus.tgt_inventory = out_dir / "tgt_phones.json";
  corpus.mt_primary = out_dir / "mt_primary.json";
  corpus.mt_secondary = out_dir / "mt_secondary.json";
  WriteLexicon(src_lex, corpus.src_lexicon);
  WriteLexicon(tgt_lex, corpus.tgt_lexicon);
  WriteInventory(PhoneInventory(spec.src_vocab), corpus.src_inventory);
  WriteInventory(PhoneInventory(spec.tgt_vocab), corpus.tgt_inventory);
  WriteWordMap(spec.mapping_primary, corpus.mt_primary);
  WriteWordMap(spec.mapping_secondary, corpus.mt_secondary);
  WriteFileBytes(out_dir / "toy_spec.json", spec.ToJson().dump(2) + "\n");
  return corpus;
}

ToyCorpus LoadToyCorpus(const std::filesystem::path& dir, ToySpec* spec) {
  const std::filesystem::path spec_path = dir / "toy_spec.json";
  if (!std::filesystem::exists(spec_path)) {
    throw IoError(dir.string() + ": no toy corpus (toy_spec.json missing)");
  }
  ToySpec loaded;
  try {
    loaded = ToySpec::FromJson(nlohmann::json::parse(ReadFileBytes(spec_path)), ToySpec::Default());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(spec_path.string() + ": " + e.what());
  }
  ToyCorpus corpus;
  corpus.primary_manifest = dir / "primary.jsonl";
  corpus.secondary_manifest = dir / "secondary.jsonl";
  corpus.primary = ReadManifest(corpus.primary_manifest);
  corpus.secondary = ReadManifest(corpus.secondary_manifest);
  if (loaded.n_eval > 0) {
    corpus.eval_manifest = dir / "eval.jsonl";
    corpus.eval = ReadManifest(corpus.eval_manifest);
  } else {
    corpus.eval.role = Role::kPrimary;
    corpus.eval.base_dir = dir;
  }
  corpus.src_lexicon = dir / "src_lexicon.json";
  corpus.tgt_lexicon = dir / "tgt_lexicon.json";
  corpus.src_inventory = dir / "src_phones.json";
  corpus.tgt_inventory = dir / "tgt_phones.json";
  corpus.mt_primary = dir / "mt_primary.json";
  corpus.mt_secondary = dir / "mt_secondary.json";
  if (spec != nullptr) *spec = loaded;
  return corpus;
}

}  // namespace s2st::data
