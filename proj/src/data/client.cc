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

#include "s2st/data/client.h"

#include <sstream>

#include "s2st/common/binary_io.h"
#include "s2st/common/error.h"

namespace s2st::data {

std::string_view ClientTaskName(ClientTask t) {
  switch (t) {
    case ClientTask::kMt: return "mt";
    case ClientTask::kTts: return "tts";
    case ClientTask::kAsr: return "asr";
  }
  return "?";
}

ClientTask ParseClientTask(std::string_view s) {
  if (s == "mt") return ClientTask::kMt;
  if (s == "tts") return ClientTask::kTts;
  if (s == "asr") return ClientTask::kAsr;
  throw ParseError("unknown client task '" + std::string(s) + "'");
}

nlohmann::ordered_json ClientRequest::ToJson() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["task"] = ClientTaskName(task);
  if (task == ClientTask::kAsr) {
    j["audio"] = audio;
  } else {
    j["text"] = text;
  }
  return j;
}

ClientRequest ClientRequest::FromJson(const nlohmann::json& j) {
  try {
    ClientRequest r;
    r.id = j.at("id").get<std::string>();
    r.task = ParseClientTask(j.at("task").get<std::string>());
    r.text = j.value("text", std::string());
    r.audio = j.value("audio", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad client request: ") + e.what());
  }
}

nlohmann::ordered_json ClientResponse::ToJson() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["ok"] = ok;
  if (!text.empty()) j["text"] = text;
  if (!audio.empty()) j["audio"] = audio;
  if (!err.empty()) j["err"] = err;
  return j;
}

ClientResponse ClientResponse::FromJson(const nlohmann::json& j) {
  try {
    ClientResponse r;
    r.id = j.at("id").get<std::string>();
    r.ok = j.at("ok").get<bool>();
    r.text = j.value("text", std::string());
    r.audio = j.value("audio", std::string());
    r.err = j.value("err", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad client response: ") + e.what());
  }
}

std::vector<ClientResponse> RunCorrelated(Client& client,
                                          const std::vector<ClientRequest>& requests) {
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < requests.size(); ++i) {
    if (!index.emplace(requests[i].id, i).second) {
      throw ContractError("client: duplicate request id '" + requests[i].id + "'");
    }
  }
  std::vector<ClientResponse> out(requests.size());
  std::vector<int> seen(requests.size(), 0);
  for (ClientResponse& r : client.Run(requests)) {
    const auto it = index.find(r.id);
    if (it == index.end()) continue;
    ++seen[it->second];
    out[it->second] = std::move(r);
  }
  for (size_t i = 0; i < requests.size(); ++i) {
    if (seen[i] != 1) {
      out[i] = ClientResponse{requests[i].id, false, "", "",
                              seen[i] == 0 ? "no response" : "duplicate responses"};
    }
  }
  return out;
}

std::vector<ClientResponse> InProcessClient::Run(const std::vector<ClientRequest>& requests) {
  std::vector<ClientResponse> out;
  out.reserve(requests.size());
  for (const ClientRequest& r : requests) {
    try {
      out.push_back(Handle(r));
    } catch (const std::exception& e) {
      out.push_back({r.id, false, "", "", e.what()});
    }
  }
  return out;
}

RecordingClient::RecordingClient(Client& inner, const std::filesystem::path& transcript)
    : inner_(inner), transcript_(transcript) {
  if (transcript_.has_parent_path()) std::filesystem::create_directories(transcript_.parent_path());
}

std::vector<ClientResponse> RecordingClient::Run(const std::vector<ClientRequest>& requests) {
  std::vector<ClientResponse> responses = RunCorrelated(inner_, requests);
  std::ofstream out(transcript_, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to transcript " + transcript_.string());
  for (size_t i = 0; i < requests.size(); ++i) {
    nlohmann::ordered_json line;
    line["request"] = requests[i].ToJson();
    line["response"] = responses[i].ToJson();
    out << line.dump() << "\n";
  }
  return responses;
}

ReplayClient::ReplayClient(const std::filesystem::path& transcript) {
  std::istringstream in(ReadFileBytes(transcript));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      const ClientRequest req = ClientRequest::FromJson(j.at("request"));
      answers_[req.ToJson().dump()] = ClientResponse::FromJson(j.at("response"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(transcript.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::vector<ClientResponse> ReplayClient::Run(const std::vector<ClientRequest>& requests) {
  std::vector<ClientResponse> out;
  for (const ClientRequest& r : requests) {
    const auto it = answers_.find(r.ToJson().dump());
    if (it == answers_.end()) {
      throw ClientError("replay: no recorded response for request " + r.ToJson().dump());
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace s2st::data
