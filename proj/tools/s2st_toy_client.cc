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

// Line-oriented toy MT/TTS/ASR service speaking the client wire protocol:
// JSON requests on stdin, JSON responses on stdout.

#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "s2st/common/phones.h"
#include "s2st/data/phonemize.h"
#include "s2st/data/toy_clients.h"
#include "s2st/data/toy_corpus.h"

namespace {

bool InputPending() {
  pollfd pfd{STDIN_FILENO, POLLIN, 0};
  return ::poll(&pfd, 1, 0) > 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace s2st::data;
  CLI::App app{"Toy MT/TTS/ASR service for the client protocol"};
  std::string task = "mt", mode = "dictionary", dictionary, inventory, out_dir = ".";
  std::string fail_ids;
  int frames_per_phone = 4;
  bool reorder = false;
  app.add_option("--task", task, "mt, tts or asr")->check(CLI::IsMember({"mt", "tts", "asr"}));
  app.add_option("--mode", mode, "MT mode: dictionary, identity or reverse");
  app.add_option("--dictionary", dictionary, "JSON word map for dictionary MT");
  app.add_option("--inventory", inventory, "target phone inventory for TTS/ASR");
  app.add_option("--out-dir", out_dir, "where TTS writes audio");
  app.add_option("--frames-per-phone", frames_per_phone);
  app.add_option("--fail-ids", fail_ids, "comma-separated ids that always fail");
  app.add_flag("--reorder", reorder, "answer each burst of requests in reverse order");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<InProcessClient> client;
  try {
    ToyVoice voice;
    voice.frames_per_phone = frames_per_phone;
    if (task != "mt") {
      if (inventory.empty()) throw std::runtime_error("--inventory is required for " + task);
      const PhoneInventory inv = ReadInventory(inventory);
      voice.phones.assign(inv.symbols().begin() + s2st::kNumSpecialPhones, inv.symbols().end());
    }
    if (task == "mt") {
      std::set<std::string> fails;
      std::stringstream ss(fail_ids);
      for (std::string id; std::getline(ss, id, ',');) {
        if (!id.empty()) fails.insert(id);
      }
      const ToyMtMode m = ParseToyMtMode(mode);
      client = std::make_unique<ToyMtClient>(
          m, dictionary.empty() ? std::map<std::string, std::string>{} : ReadWordMap(dictionary),
          fails);
    } else if (task == "tts") {
      client = std::make_unique<ToyTtsClient>(voice, out_dir);
    } else {
      client = std::make_unique<ToyAsrClient>(voice);
    }
  } catch (const std::exception& e) {
    std::cerr << "s2st_toy_client: " << e.what() << "\n";
    return 2;
  }

  std::ios::sync_with_stdio(false);
  std::vector<std::string> burst;
  const auto answer = [&] {
    if (reorder) std::reverse(burst.begin(), burst.end());
    for (const std::string& line : burst) {
      s2st::data::ClientResponse response;
      try {
        const ClientRequest request = ClientRequest::FromJson(nlohmann::json::parse(line));
        response = client->Run({request}).front();
      } catch (const std::exception& e) {
        response.ok = false;
        response.err = e.what();
      }
      std::cout << response.ToJson().dump() << "\n";
    }
    std::cout.flush();
    burst.clear();
  };
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    burst.push_back(line);
    // getline may have buffered further lines that poll() cannot see.
    if (std::cin.rdbuf()->in_avail() <= 0 && !InputPending()) answer();
  }
  answer();
  return 0;
}
