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

#include "s2st/cli/run_config.h"

#include <cstdlib>
#include <set>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const train::StageKind kAllKinds[] = {train::StageKind::kPretrain, train::StageKind::kFinetune,
                                      train::StageKind::kMixed, train::StageKind::kPrompt};

train::StageConfig ProfileStage(const std::string& profile, train::StageKind kind) {
  if (profile == "fisher") return train::StageConfig::Fisher(kind);
  if (profile == "teden2zh") return train::StageConfig::TedEn2Zh(kind);
  return train::StageConfig::Toy(kind);
}

void RejectUnknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError((where.empty() ? key : where + "." + key) + ": unknown key");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

fs::path Resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

eval::DecodeConfig::Mode ParseDecodeMode(const std::string& s) {
  if (s == "greedy") return eval::DecodeConfig::Mode::kGreedy;
  if (s == "beam") return eval::DecodeConfig::Mode::kBeam;
  throw ConfigError("eval.decode.mode: expected greedy or beam, got '" + s + "'");
}

}  // namespace

audio::FrontendConfig FrontendSettings::Source() const {
  return audio::FrontendConfig::ForSampleRate(src_sample_rate);
}

audio::FrontendConfig FrontendSettings::Target() const {
  audio::FrontendConfig c = audio::FrontendConfig::ForSampleRate(tgt_sample_rate);
  c.hop_length = tgt_hop_length;
  return c;
}

std::vector<std::string> ProfileNames() { return {"toy", "fisher", "teden2zh"}; }

RunConfig ProfileConfig(const std::string& name) {
  RunConfig c;
  c.profile = name;
  c.toy = data::ToySpec::Default();
  if (name == "toy") {
    c.model = model::ModelConfig::Toy();
    c.model.prompt_enabled = true;
  } else if (name == "fisher") {
    c.model = model::ModelConfig::Fisher();
    c.frontend.src_sample_rate = 8000;
  } else if (name == "teden2zh") {
    c.model = model::ModelConfig::TedEn2Zh();
    c.frontend.src_sample_rate = 16000;
  } else {
    throw ConfigError("profile: unknown profile '" + name + "' (toy, fisher or teden2zh)");
  }
  return c;
}

train::StageConfig RunConfig::Stage(train::StageKind kind) const {
  for (const train::StageConfig& s : stages) {
    if (s.kind == kind) return s;
  }
  train::StageConfig s = ProfileStage(profile, kind);
  s.seed = seed;
  return s;
}

eval::EvalConfig RunConfig::EvalConfig() const {
  eval::EvalConfig c;
  c.decode = eval.decode;
  c.prompt = eval.prompt;
  c.spectrogram_l1 = eval.spectrogram_l1;
  c.asr.frontend = frontend.Target();
  c.asr.griffin_lim_iterations = eval.griffin_lim_iterations;
  c.asr.stop_threshold = eval.stop_threshold;
  c.asr.prompt = eval.prompt;
  return c;
}

fs::path RunConfig::PrimaryManifest() const {
  return paths.primary.empty() ? paths.data_dir / "prepared" / "primary.jsonl" : paths.primary;
}

fs::path RunConfig::SecondaryManifest() const {
  return paths.secondary.empty() ? paths.data_dir / "prepared" / "secondary.jsonl"
                                 : paths.secondary;
}

fs::path RunConfig::EvalManifest() const {
  return paths.eval.empty() ? paths.data_dir / "prepared" / "eval.jsonl" : paths.eval;
}

void RunConfig::Validate() const {
  model.Validate();
  toy.Validate();
  eval.decode.Validate();
  if (eval.griffin_lim_iterations < 1) {
    throw ConfigError("eval.griffin_lim_iterations: must be >= 1");
  }
  try {
    frontend.Source().Validate();
    frontend.Target().Validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("frontend: ") + e.what());
  }
  std::set<train::StageKind> seen;
  bool after_non_pretrain = false;
  for (size_t i = 0; i < stages.size(); ++i) {
    const train::StageConfig& s = stages[i];
    const std::string where = "stages." + std::to_string(i);
    if (!seen.insert(s.kind).second) {
      throw ConfigError(where + ".kind: stage '" + std::string(train::StageKindName(s.kind)) +
                        "' appears twice");
    }
    if (s.kind == train::StageKind::kPretrain && after_non_pretrain) {
      throw ConfigError(where + ".kind: pretrain must come before finetune, mixed and prompt");
    }
    if (s.kind != train::StageKind::kPretrain) after_non_pretrain = true;
    s.Validate(model);
  }
}

ordered_json RunConfig::ToJson() const {
  ordered_json j;
  j["profile"] = profile;
  j["seed"] = seed;
  j["model"] = model.ToJson();
  ordered_json st = ordered_json::array();
  for (const auto& s : stages) st.push_back(s.ToJson());
  j["stages"] = std::move(st);
  j["frontend"] = {{"src_sample_rate", frontend.src_sample_rate},
                   {"tgt_sample_rate", frontend.tgt_sample_rate},
                   {"tgt_hop_length", frontend.tgt_hop_length}};
  j["paths"] = {{"output_dir", paths.output_dir.string()},
                {"data_dir", paths.data_dir.string()},
                {"primary", paths.primary.string()},
                {"secondary", paths.secondary.string()},
                {"eval", paths.eval.string()},
                {"mt_command", paths.mt_command},
                {"tts_command", paths.tts_command},
                {"asr_command", paths.asr_command}};
  j["toy"] = toy.ToJson();
  j["eval"] = {{"decode",
                {{"mode", eval.decode.mode == eval::DecodeConfig::Mode::kGreedy ? "greedy" : "beam"},
                 {"beam_size", eval.decode.beam_size},
                 {"max_len", eval.decode.max_len},
                 {"length_penalty", eval.decode.length_penalty}}},
               {"prompt", eval::PromptPolicyName(eval.prompt)},
               {"spectrogram_l1", eval.spectrogram_l1},
               {"asr_bleu", eval.asr_bleu},
               {"griffin_lim_iterations", eval.griffin_lim_iterations},
               {"stop_threshold", eval.stop_threshold}};
  return j;
}

uint64_t RunConfig::Fingerprint() const { return Fnv1a64(ToJson().dump()); }

void ApplyOverride(json& tree, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "': expected key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    parts.push_back(path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json* node = &tree;
  for (size_t i = 0; i < parts.size(); ++i) {
    const std::string& key = parts[i];
    if (key.empty()) throw ConfigError("override '" + assignment + "': empty path segment");
    const bool last = i + 1 == parts.size();
    if (node->is_null()) *node = json::object();
    if (node->is_array()) {
      json* next = nullptr;
      if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos) {
        const size_t idx = std::stoul(key);
        if (idx >= node->size()) {
          throw ConfigError("override '" + assignment + "': index " + key + " out of range");
        }
        next = &(*node)[idx];
      } else {
        train::ParseStageKind(key);  // only stage kinds name array elements
        for (auto& el : *node) {
          if (el.is_object() && el.value("kind", "") == key) next = &el;
        }
        if (next == nullptr) {
          node->push_back({{"kind", key}});
          next = &node->back();
        }
      }
      if (last) {
        *next = value;
      } else {
        node = next;
      }
      continue;
    }
    if (!node->is_object()) {
      throw ConfigError("override '" + assignment + "': '" + key + "' is not inside an object");
    }
    if (last) {
      (*node)[key] = value;
    } else {
      if (!node->contains(key)) (*node)[key] = key == "stages" ? json::array() : json::object();
      node = &(*node)[key];
    }
  }
}

RunConfig ConfigFromJson(const json& tree, const fs::path& base_dir) {
  RejectUnknown(tree, "", {"profile", "seed", "model", "stages", "frontend", "paths", "toy", "eval"});
  std::string profile = "toy";
  Read(tree, "profile", "profile", profile);
  RunConfig c = ProfileConfig(profile);
  Read(tree, "seed", "seed", c.seed);
  if (tree.contains("model")) c.model = model::ModelConfig::FromJson(tree.at("model"), c.model);
  if (tree.contains("stages")) {
    const json& st = tree.at("stages");
    if (!st.is_array()) throw ConfigError("stages: expected a list");
    for (size_t i = 0; i < st.size(); ++i) {
      const json& s = st[i];
      if (!s.is_object() || !s.contains("kind")) {
        throw ConfigError("stages." + std::to_string(i) + ".kind: required");
      }
      train::StageConfig base =
          ProfileStage(profile, train::ParseStageKind(s.at("kind").get<std::string>()));
      base.seed = c.seed;
      c.stages.push_back(train::StageConfig::FromJson(s, base));
    }
  }
  if (tree.contains("frontend")) {
    const json& f = tree.at("frontend");
    RejectUnknown(f, "frontend", {"src_sample_rate", "tgt_sample_rate", "tgt_hop_length"});
    Read(f, "src_sample_rate", "frontend", c.frontend.src_sample_rate);
    Read(f, "tgt_sample_rate", "frontend", c.frontend.tgt_sample_rate);
    Read(f, "tgt_hop_length", "frontend", c.frontend.tgt_hop_length);
  }
  if (tree.contains("paths")) {
    const json& p = tree.at("paths");
    RejectUnknown(p, "paths", {"output_dir", "data_dir", "primary", "secondary", "eval",
                               "mt_command", "tts_command", "asr_command"});
    std::string s;
    auto path = [&](const char* key, fs::path& out) {
      s.clear();
      Read(p, key, "paths", s);
      if (!s.empty()) out = s;
    };
    path("output_dir", c.paths.output_dir);
    path("data_dir", c.paths.data_dir);
    path("primary", c.paths.primary);
    path("secondary", c.paths.secondary);
    path("eval", c.paths.eval);
    Read(p, "mt_command", "paths", c.paths.mt_command);
    Read(p, "tts_command", "paths", c.paths.tts_command);
    Read(p, "asr_command", "paths", c.paths.asr_command);
  }
  if (tree.contains("toy")) c.toy = data::ToySpec::FromJson(tree.at("toy"), c.toy);
  if (!tree.contains("toy") || !tree.at("toy").contains("seed")) c.toy.seed = c.seed;
  if (tree.contains("eval")) {
    const json& e = tree.at("eval");
    RejectUnknown(e, "eval", {"decode", "prompt", "spectrogram_l1", "asr_bleu",
                              "griffin_lim_iterations", "stop_threshold"});
    if (e.contains("decode")) {
      const json& d = e.at("decode");
      RejectUnknown(d, "eval.decode", {"mode", "beam_size", "max_len", "length_penalty"});
      std::string mode;
      Read(d, "mode", "eval.decode", mode);
      if (!mode.empty()) c.eval.decode.mode = ParseDecodeMode(mode);
      Read(d, "beam_size", "eval.decode", c.eval.decode.beam_size);
      Read(d, "max_len", "eval.decode", c.eval.decode.max_len);
      Read(d, "length_penalty", "eval.decode", c.eval.decode.length_penalty);
    }
    std::string prompt;
    Read(e, "prompt", "eval", prompt);
    if (!prompt.empty()) c.eval.prompt = eval::ParsePromptPolicy(prompt);
    Read(e, "spectrogram_l1", "eval", c.eval.spectrogram_l1);
    Read(e, "asr_bleu", "eval", c.eval.asr_bleu);
    Read(e, "griffin_lim_iterations", "eval", c.eval.griffin_lim_iterations);
    Read(e, "stop_threshold", "eval", c.eval.stop_threshold);
  }

  const char* root = std::getenv("S2ST_OUTPUT_ROOT");
  c.paths.output_dir = Resolve(c.paths.output_dir, root != nullptr && *root != '\0'
                                                      ? fs::path(root)
                                                      : base_dir);
  c.paths.data_dir = Resolve(c.paths.data_dir, base_dir);
  c.paths.primary = Resolve(c.paths.primary, base_dir);
  c.paths.secondary = Resolve(c.paths.secondary, base_dir);
  c.paths.eval = Resolve(c.paths.eval, base_dir);
  c.Validate();
  return c;
}

RunConfig LoadConfig(const fs::path& path, const std::vector<std::string>& overrides) {
  json tree;
  try {
    tree = json::parse(ReadFileBytes(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  for (const std::string& o : overrides) ApplyOverride(tree, o);
  return ConfigFromJson(tree, fs::absolute(path).parent_path());
}

}  // namespace s2st::cli
