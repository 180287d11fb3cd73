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

#include "s2st/train/checkpoint.h"

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::train {

namespace {

constexpr std::string_view kMagic = "S2STCKPT";
constexpr uint32_t kVersion = 1;

void PutSection(ByteWriter& out, std::string_view tag, std::string_view payload) {
  out.PutBytes(tag);
  out.PutU64(payload.size());
  out.PutBytes(payload);
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const model::Translatotron& model,
                    const StageConfig& stage, const CheckpointMeta& meta,
                    const AdamOptimizer* optimizer) {
  ByteWriter out;
  out.PutBytes(kMagic);
  out.PutU32(kVersion);
  PutSection(out, "CONF", model.config().ToJson().dump());
  PutSection(out, "STAG", stage.ToJson().dump());
  ByteWriter m;
  m.PutString(StageKindName(meta.stage));
  m.PutU64(static_cast<uint64_t>(meta.step));
  m.PutU64(meta.model_fingerprint);
  m.PutU64(meta.stage_fingerprint);
  m.PutU64(meta.seed);
  PutSection(out, "META", m.bytes());
  ByteWriter p;
  model.params().SerializeTo(p);
  PutSection(out, "PARM", p.bytes());
  if (optimizer != nullptr) {
    ByteWriter o;
    optimizer->SerializeTo(o);
    PutSection(out, "OPTM", o.bytes());
  }
  const uint64_t checksum = Fnv1a64(out.bytes());
  out.PutBytes("CSUM");
  out.PutU64(checksum);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write-then-rename so an interrupted save never leaves a partial file.
  const std::filesystem::path tmp = path.string() + ".tmp";
  WriteFileBytes(tmp, out.bytes());
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint ReadCheckpoint(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  const std::string name = path.string();
  ByteReader in(bytes, name);
  if (bytes.size() < kMagic.size() || in.GetBytes(kMagic.size()) != kMagic) {
    throw IntegrityError(name + ": not a checkpoint (bad magic)");
  }
  const uint32_t version = in.GetU32();
  if (version != kVersion) {
    throw IntegrityError(name + ": unsupported checkpoint version " + std::to_string(version));
  }
  LoadedCheckpoint ck;
  bool have_conf = false, have_stage = false, have_meta = false, have_parm = false;
  for (;;) {
    const size_t section_start = in.position();
    const std::string tag(in.GetBytes(4));
    if (tag == "CSUM") {
      const uint64_t stored = in.GetU64();
      if (stored != Fnv1a64(std::string_view(bytes).substr(0, section_start))) {
        throw IntegrityError(name + ": checksum mismatch");
      }
      if (!in.done()) throw IntegrityError(name + ": trailing bytes after checksum");
      break;
    }
    const uint64_t len = in.GetU64();
    if (len > in.remaining()) throw IntegrityError(name + ": section " + tag + " is truncated");
    const std::string_view payload = in.GetBytes(len);
    try {
      if (tag == "CONF") {
        ck.config = model::ModelConfig::FromJson(nlohmann::json::parse(payload),
                                                 model::ModelConfig());
        have_conf = true;
      } else if (tag == "STAG") {
        ck.stage = StageConfig::FromJson(nlohmann::json::parse(payload), StageConfig());
        have_stage = true;
      } else if (tag == "META") {
        ByteReader m(payload, name);
        ck.meta.stage = ParseStageKind(m.GetString());
        ck.meta.step = static_cast<int64_t>(m.GetU64());
        ck.meta.model_fingerprint = m.GetU64();
        ck.meta.stage_fingerprint = m.GetU64();
        ck.meta.seed = m.GetU64();
        have_meta = true;
      } else if (tag == "PARM") {
        ck.params_block = std::string(payload);
        have_parm = true;
      } else if (tag == "OPTM") {
        ck.optimizer_block = std::string(payload);
      } else {
        throw IntegrityError(name + ": unknown section '" + tag + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw IntegrityError(name + ": section " + tag + ": " + e.what());
    }
  }
  if (!have_conf || !have_stage || !have_meta || !have_parm) {
    throw IntegrityError(name + ": missing required section");
  }
  return ck;
}

void RestoreParameters(const LoadedCheckpoint& ckpt, model::Translatotron& model) {
  if (ckpt.meta.model_fingerprint != model.config().Fingerprint()) {
    throw FingerprintError("checkpoint model fingerprint " +
                           std::to_string(ckpt.meta.model_fingerprint) +
                           " does not match the configured model " +
                           std::to_string(model.config().Fingerprint()));
  }
  ByteReader in(ckpt.params_block, "checkpoint parameters");
  model.params().DeserializeFrom(in);
  if (!in.done()) throw IntegrityError("checkpoint parameter block has trailing bytes");
}

std::unique_ptr<model::Translatotron> LoadModel(const std::filesystem::path& path) {
  const LoadedCheckpoint ck = ReadCheckpoint(path);
  auto model = std::make_unique<model::Translatotron>(ck.config, 0);
  RestoreParameters(ck, *model);
  return model;
}

}  // namespace s2st::train
