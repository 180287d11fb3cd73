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

#include "s2st/data/toy_clients.h"

#include <algorithm>
#include <cmath>

#include "s2st/audio/resample.h"
#include "s2st/audio/wav_io.h"
#include "s2st/common/error.h"

namespace s2st::data {

namespace {

constexpr double kSilenceLogEnergy = -15.0;

ClientResponse Fail(const ClientRequest& r, std::string why) {
  return {r.id, false, "", "", std::move(why)};
}

// Mean log-mel vector of frames [begin, end), centered to zero mean.
std::vector<double> SegmentVector(const audio::MelSpectrogram& mel, int64_t begin, int64_t end,
                                  double* peak) {
  std::vector<double> v(audio::kNumMels, 0.0);
  for (int64_t t = begin; t < end; ++t) {
    for (int c = 0; c < audio::kNumMels; ++c) v[c] += mel.at(t, c);
  }
  double mean = 0.0;
  *peak = -1e300;
  for (double& x : v) {
    x /= static_cast<double>(end - begin);
    mean += x;
    *peak = std::max(*peak, x);
  }
  mean /= audio::kNumMels;
  for (double& x : v) x -= mean;
  return v;
}

double Cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(std::max(aa * bb, 1e-300));
}

}  // namespace

ToyMtMode ParseToyMtMode(const std::string& s) {
  if (s == "dictionary") return ToyMtMode::kDictionary;
  if (s == "identity") return ToyMtMode::kIdentity;
  if (s == "reverse") return ToyMtMode::kReverse;
  throw ConfigError("unknown toy MT mode '" + s + "'");
}

ToyMtClient::ToyMtClient(ToyMtMode mode, std::map<std::string, std::string> dictionary,
                         std::set<std::string> fail_ids)
    : mode_(mode), dictionary_(std::move(dictionary)), fail_ids_(std::move(fail_ids)) {}

ClientResponse ToyMtClient::Handle(const ClientRequest& request) {
  if (request.task != ClientTask::kMt) return Fail(request, "toy MT only serves mt requests");
  if (fail_ids_.count(request.id)) return Fail(request, "injected failure");
  std::vector<std::string> words = SplitWords(request.text);
  switch (mode_) {
    case ToyMtMode::kIdentity:
      break;
    case ToyMtMode::kReverse:
      std::reverse(words.begin(), words.end());
      break;
    case ToyMtMode::kDictionary:
      for (std::string& w : words) {
        const auto it = dictionary_.find(w);
        if (it == dictionary_.end()) return Fail(request, "untranslatable word '" + w + "'");
        w = it->second;
      }
      break;
  }
  return {request.id, true, JoinWords(words), "", ""};
}

ToyTtsClient::ToyTtsClient(ToyVoice voice, std::filesystem::path out_dir)
    : voice_(std::move(voice)),
      out_dir_(std::move(out_dir)),
      templates_(TargetTemplates(static_cast<int>(voice_.phones.size()))) {}

audio::Waveform ToyTtsClient::Synthesize(const std::vector<std::string>& words) const {
  std::vector<int> idx;
  for (const std::string& w : words) {
    const auto it = std::find(voice_.phones.begin(), voice_.phones.end(), w);
    if (it == voice_.phones.end()) throw VocabError("toy TTS: unknown phone '" + w + "'");
    idx.push_back(static_cast<int>(it - voice_.phones.begin()));
  }
  SynthesisOptions opts;
  opts.sample_rate = voice_.sample_rate;
  opts.samples_per_phone = voice_.frames_per_phone * voice_.hop_length;
  return SynthesizePhones(idx, templates_, opts);
}

ClientResponse ToyTtsClient::Handle(const ClientRequest& request) {
  if (request.task != ClientTask::kTts) return Fail(request, "toy TTS only serves tts requests");
  const std::vector<std::string> words = SplitWords(request.text);
  if (words.empty()) return Fail(request, "empty text");
  audio::Waveform wave;
  try {
    wave = Synthesize(words);
  } catch (const VocabError& e) {
    return Fail(request, e.what());
  }
  std::filesystem::create_directories(out_dir_);
  const std::filesystem::path path = out_dir_ / (request.id + ".wav");
  audio::WriteWav(path, wave, audio::WavEncoding::kFloat32);
  return {request.id, true, "", path.string(), ""};
}

ToyAsrClient::ToyAsrClient(ToyVoice voice) : voice_(std::move(voice)) {
  frontend_ = audio::FrontendConfig::ForSampleRate(voice_.sample_rate);
  frontend_.hop_length = voice_.hop_length;
  frontend_.Validate();
  const auto templates = TargetTemplates(static_cast<int>(voice_.phones.size()));
  SynthesisOptions opts;
  opts.sample_rate = voice_.sample_rate;
  opts.samples_per_phone = voice_.frames_per_phone * voice_.hop_length;
  for (size_t p = 0; p < templates.size(); ++p) {
    const audio::Waveform w = SynthesizePhones({static_cast<int>(p)}, templates, opts);
    const audio::MelSpectrogram mel = audio::ComputeMelSpectrogram(w, frontend_);
    double peak;
    prototypes_.push_back(SegmentVector(mel, 0, mel.num_frames, &peak));
  }
}

std::vector<std::string> ToyAsrClient::RecognizeMel(const audio::MelSpectrogram& mel) const {
  std::vector<std::string> out;
  const int64_t seg = voice_.frames_per_phone;
  for (int64_t begin = 0; begin < mel.num_frames; begin += seg) {
    const int64_t end = std::min(begin + seg, mel.num_frames);
    if (2 * (end - begin) < seg) break;  // short tail
    double peak;
    const std::vector<double> v = SegmentVector(mel, begin, end, &peak);
    if (peak < kSilenceLogEnergy) continue;
    size_t best = 0;
    double best_score = -2.0;
    for (size_t p = 0; p < prototypes_.size(); ++p) {
      const double s = Cosine(v, prototypes_[p]);
      if (s > best_score) {
        best_score = s;
        best = p;
      }
    }
    out.push_back(voice_.phones[best]);
  }
  return out;
}

std::vector<std::string> ToyAsrClient::Recognize(const audio::Waveform& wave) const {
  const audio::Waveform w =
      wave.sample_rate == voice_.sample_rate ? wave : audio::Resample(wave, voice_.sample_rate);
  return RecognizeMel(audio::ComputeMelSpectrogram(w, frontend_));
}

ClientResponse ToyAsrClient::Handle(const ClientRequest& request) {
  if (request.task != ClientTask::kAsr) return Fail(request, "toy ASR only serves asr requests");
  audio::Waveform wave;
  try {
    wave = audio::ReadWav(request.audio);
  } catch (const Error& e) {
    return Fail(request, e.what());
  }
  return {request.id, true, JoinWords(Recognize(wave)), "", ""};
}

}  // namespace s2st::data
