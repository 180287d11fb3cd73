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

#ifndef S2ST_DATA_TOY_DATASET_H_
#define S2ST_DATA_TOY_DATASET_H_

#include <filesystem>
#include <vector>

#include "s2st/data/client.h"
#include "s2st/data/pipeline.h"
#include "s2st/data/toy_corpus.h"

namespace s2st::data {

struct PreparedToyData {
  ToyCorpus corpus;
  CorpusManifest primary;
  CorpusManifest secondary;
  CorpusManifest eval;
  // Records removed by the filters, with reasons.
  CorpusManifest dropped;
};

// Standard preparation of a generated toy corpus under dir: pseudo
// translation of the secondary set through `mt`, target synthesis through
// `tts` for every set, feature extraction and filtering. Client traffic is
// recorded to dir/transcripts/{mt,tts}.jsonl. Null clients select the
// in-process toy services. Prepared manifests are written to
// dir/prepared/{primary,secondary,eval}.jsonl.
PreparedToyData PrepareToyDataset(const ToySpec& spec, const ToyCorpus& corpus,
                                  const std::filesystem::path& dir, Client* mt = nullptr,
                                  Client* tts = nullptr);

// GenerateToyCorpus followed by PrepareToyDataset in the same directory.
PreparedToyData BuildToyDataset(const ToySpec& spec, const std::filesystem::path& dir,
                                Client* mt = nullptr, Client* tts = nullptr);

// Filters used for prepared toy data: code switching between the source and
// target symbol alphabets, failed synthesis, failed preparation, empty text.
std::vector<FilterRule> ToyFilterRules(const ToySpec& spec);

}  // namespace s2st::data

#endif  // S2ST_DATA_TOY_DATASET_H_
