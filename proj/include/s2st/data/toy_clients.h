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

#ifndef S2ST_DATA_TOY_CLIENTS_H_
#define S2ST_DATA_TOY_CLIENTS_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "s2st/audio/mel.h"
#include "s2st/audio/waveform.h"
#include "s2st/data/client.h"
#include "s2st/data/toy_corpus.h"

namespace s2st::data {

enum class ToyMtMode { kDictionary, kIdentity, kReverse };

ToyMtMode ParseToyMtMode(const std::string& s);

// Word-level translation. Dictionary mode fails on unknown words; ids in
// fail_ids always fail.
class ToyMtClient : public InProcessClient {
 public:
  explicit ToyMtClient(ToyMtMode mode, std::map<std::string, std::string> dictionary = {},
                       std::set<std::string> fail_ids = {});
  ClientResponse Handle(const ClientRequest& request) override;

 private:
  ToyMtMode mode_;
  std::map<std::string, std::string> dictionary_;
  std::set<std::string> fail_ids_;
};

struct ToyVoice {
  std::vector<std::string> phones;
  int frames_per_phone = 4;
  int sample_rate = 24000;
  int hop_length = 240;
};

// Renders each word of the text as one target phone template and writes
// out_dir/<id>.wav. Empty or unknown text fails.
class ToyTtsClient : public InProcessClient {
 public:
  ToyTtsClient(ToyVoice voice, std::filesystem::path out_dir);
  ClientResponse Handle(const ClientRequest& request) override;
  audio::Waveform Synthesize(const std::vector<std::string>& words) const;

 private:
  ToyVoice voice_;
  std::filesystem::path out_dir_;
  std::vector<PhoneTemplate> templates_;
};

// Template-matching recognizer for audio made of target phone templates.
// Audio is cut into segments of frames_per_phone mel frames; each segment is
// labelled with the template of highest centered-cosine similarity, and
// near-silent segments are skipped.
class ToyAsrClient : public InProcessClient {
 public:
  explicit ToyAsrClient(ToyVoice voice);
  ClientResponse Handle(const ClientRequest& request) override;
  std::vector<std::string> Recognize(const audio::Waveform& wave) const;
  std::vector<std::string> RecognizeMel(const audio::MelSpectrogram& mel) const;

 private:
  ToyVoice voice_;
  audio::FrontendConfig frontend_;
  std::vector<std::vector<double>> prototypes_;
};

}  // namespace s2st::data

#endif  // S2ST_DATA_TOY_CLIENTS_H_
