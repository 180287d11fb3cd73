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

#ifndef S2ST_DATA_BATCHING_H_
#define S2ST_DATA_BATCHING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "s2st/data/manifest.h"

namespace s2st::data {

struct Batch {
  // Indices into the manifest's records.
  std::vector<size_t> indices;
  // Sum of src_frames over the batch.
  int64_t tokens = 0;
  // A single record longer than the cap.
  bool oversize = false;
};

// Greedy packing by source frame count. With sort_by_length the records are
// visited in stable order of src_frames, else in manifest order. A record
// above max_tokens becomes a singleton batch and a warning is appended.
std::vector<Batch> BatchByTokens(const CorpusManifest& manifest, int64_t max_tokens,
                                 bool sort_by_length,
                                 std::vector<std::string>* warnings = nullptr);

}  // namespace s2st::data

#endif  // S2ST_DATA_BATCHING_H_
