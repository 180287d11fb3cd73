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

#include "s2st/data/manifest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::data {

namespace fs = std::filesystem;

void CorpusManifest::Validate() const {
  std::set<std::string> seen;
  for (const UtteranceRecord& r : records) {
    if (!seen.insert(r.id).second) throw ContractError("manifest: duplicate id '" + r.id + "'");
    if (role == Role::kPrimary && r.category != Category::kPrimary) {
      throw ContractError("manifest: record '" + r.id + "' is secondary in a primary manifest");
    }
    if (role == Role::kSecondary && r.category != Category::kSecondary) {
      throw ContractError("manifest: record '" + r.id + "' is primary in a secondary manifest");
    }
  }
}

fs::path CorpusManifest::Resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

nlohmann::ordered_json RecordToJson(const UtteranceRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["src_audio"] = r.src_audio;
  j["src_sr"] = r.src_sr;
  j["src_text"] = r.src_text;
  j["src_phones"] = r.src_phones;
  j["tgt_text"] = r.tgt_text;
  j["tgt_text_origin"] = OriginName(r.tgt_text_origin);
  j["tgt_phones"] = r.tgt_phones;
  j["tgt_audio"] = r.tgt_audio;
  j["tgt_audio_origin"] = OriginName(r.tgt_audio_origin);
  j["category"] = CategoryName(r.category);
  j["src_frames"] = r.src_frames;
  j["src_duration"] = r.src_duration;
  j["tgt_frames"] = r.tgt_frames;
  j["src_mel"] = r.src_mel;
  j["tgt_mel"] = r.tgt_mel;
  j["flags"] = r.flags;
  j["drop_reason"] = r.drop_reason;
  return j;
}

UtteranceRecord RecordFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("record is not an object");
  if (!j.contains("id") || !j["id"].is_string()) throw ParseError("record has no string id");
  static const std::set<std::string> kKnown = {
      "id",       "src_audio",  "src_sr",       "src_text",   "src_phones",
      "tgt_text", "tgt_text_origin", "tgt_phones", "tgt_audio", "tgt_audio_origin",
      "category", "src_frames", "src_duration", "tgt_frames", "src_mel",
      "tgt_mel",  "flags",      "drop_reason"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnown.count(it.key())) throw ParseError("unknown field '" + it.key() + "'");
  }
  UtteranceRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.src_audio = j.value("src_audio", std::string());
    r.src_sr = j.value("src_sr", 0);
    r.src_text = j.value("src_text", std::string());
    r.src_phones = j.value("src_phones", std::vector<int64_t>());
    r.tgt_text = j.value("tgt_text", std::string());
    r.tgt_text_origin = ParseOrigin(j.value("tgt_text_origin", std::string("real")));
    r.tgt_phones = j.value("tgt_phones", std::vector<int64_t>());
    r.tgt_audio = j.value("tgt_audio", std::string());
    r.tgt_audio_origin = ParseOrigin(j.value("tgt_audio_origin", std::string("pseudo")));
    r.category = ParseCategory(j.value("category", std::string("primary")));
    r.src_frames = j.value("src_frames", int64_t{0});
    r.src_duration = j.value("src_duration", 0.0);
    r.tgt_frames = j.value("tgt_frames", int64_t{0});
    r.src_mel = j.value("src_mel", std::string());
    r.tgt_mel = j.value("tgt_mel", std::string());
    r.flags = j.value("flags", std::vector<std::string>());
    r.drop_reason = j.value("drop_reason", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field type: ") + e.what());
  }
  return r;
}

CorpusManifest ReadManifest(const fs::path& path) {
  const std::string text = ReadFileBytes(path);
  CorpusManifest m;
  m.base_dir = path.parent_path();
  bool have_role = false;
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + "malformed line: " + e.what());
    }
    if (j.is_object() && j.contains("role") && !j.contains("id")) {
      if (have_role || !m.records.empty()) throw ParseError(where + "header must be the first line");
      try {
        m.role = ParseRole(j["role"].is_string() ? j["role"].get<std::string>() : "");
      } catch (const ParseError& e) {
        throw ParseError(where + e.what());
      }
      have_role = true;
      continue;
    }
    UtteranceRecord r;
    try {
      r = RecordFromJson(j);
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    }
    if (!ids.insert(r.id).second) throw ParseError(where + "duplicate id '" + r.id + "'");
    m.records.push_back(std::move(r));
  }
  return m;
}

void WriteManifest(const CorpusManifest& manifest, const fs::path& path) {
  std::string out;
  nlohmann::ordered_json header;
  header["role"] = RoleName(manifest.role);
  out += header.dump() + "\n";
  // Relative paths are rewritten when the manifest moves to another directory.
  const fs::path target_dir = fs::absolute(path).parent_path().lexically_normal();
  const bool rebase = !manifest.base_dir.empty() &&
                      fs::absolute(manifest.base_dir).lexically_normal() != target_dir;
  for (UtteranceRecord r : manifest.records) {
    if (rebase) {
      for (std::string* p : {&r.src_audio, &r.tgt_audio, &r.src_mel, &r.tgt_mel}) {
        if (!p->empty()) *p = RelativeTo(manifest.Resolve(*p), target_dir);
      }
    }
    out += RecordToJson(r).dump() + "\n";
  }
  WriteFileBytes(path, out);
}

std::string RelativeTo(const fs::path& path, const fs::path& base) {
  if (base.empty()) return path.string();
  const fs::path abs_path = fs::absolute(path).lexically_normal();
  const fs::path abs_base = fs::absolute(base).lexically_normal();
  const fs::path rel = abs_path.lexically_relative(abs_base);
  if (rel.empty() || *rel.begin() == "..") return abs_path.string();
  return rel.string();
}

}  // namespace s2st::data
