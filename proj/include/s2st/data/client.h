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

#ifndef S2ST_DATA_CLIENT_H_
#define S2ST_DATA_CLIENT_H_

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace s2st::data {

enum class ClientTask { kMt, kTts, kAsr };

std::string_view ClientTaskName(ClientTask t);
ClientTask ParseClientTask(std::string_view s);

// Wire request: {"id", "task", "text"} for mt/tts, {"id", "task", "audio"}
// for asr.
struct ClientRequest {
  std::string id;
  ClientTask task = ClientTask::kMt;
  std::string text;
  std::string audio;

  nlohmann::ordered_json ToJson() const;
  static ClientRequest FromJson(const nlohmann::json& j);
};

// Wire response: {"id", "ok", "text" or "audio", "err"}.
struct ClientResponse {
  std::string id;
  bool ok = false;
  std::string text;
  std::string audio;
  std::string err;

  nlohmann::ordered_json ToJson() const;
  static ClientResponse FromJson(const nlohmann::json& j);
};

// MT, TTS and ASR services share this interface. Responses may come back in
// any order; a request without a response counts as a failure.
class Client {
 public:
  virtual ~Client() = default;
  virtual std::vector<ClientResponse> Run(const std::vector<ClientRequest>& requests) = 0;
};

// Runs `requests` through the client and returns one response per request,
// in request order, correlated by id. Missing or duplicated responses become
// failures with a reason.
std::vector<ClientResponse> RunCorrelated(Client& client,
                                          const std::vector<ClientRequest>& requests);

// Client answering one request at a time in-process.
class InProcessClient : public Client {
 public:
  std::vector<ClientResponse> Run(const std::vector<ClientRequest>& requests) override;
  virtual ClientResponse Handle(const ClientRequest& request) = 0;
};

// Forwards to an inner client and appends every request/response pair to a
// line-delimited transcript.
class RecordingClient : public Client {
 public:
  RecordingClient(Client& inner, const std::filesystem::path& transcript);
  std::vector<ClientResponse> Run(const std::vector<ClientRequest>& requests) override;

 private:
  Client& inner_;
  std::filesystem::path transcript_;
};

// Answers from a transcript; a request absent from it raises ClientError.
class ReplayClient : public Client {
 public:
  explicit ReplayClient(const std::filesystem::path& transcript);
  std::vector<ClientResponse> Run(const std::vector<ClientRequest>& requests) override;
  size_t size() const { return answers_.size(); }

 private:
  std::map<std::string, ClientResponse> answers_;
};

}  // namespace s2st::data

#endif  // S2ST_DATA_CLIENT_H_
