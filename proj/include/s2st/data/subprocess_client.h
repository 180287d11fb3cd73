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

#ifndef S2ST_DATA_SUBPROCESS_CLIENT_H_
#define S2ST_DATA_SUBPROCESS_CLIENT_H_

#include <string>
#include <vector>

#include "s2st/data/client.h"

namespace s2st::data {

struct SubprocessOptions {
  // Run through /bin/sh -c.
  std::string command;
  // Requests written but not yet answered.
  int max_in_flight = 16;
  // Giving up after this long without output; unanswered requests fail.
  double idle_timeout_seconds = 120.0;
};

// Starts the configured command once per Run call, streams requests to its
// stdin as JSON lines while reading responses from its stdout. A response
// window of max_in_flight bounds concurrency. A crashed or silent child
// turns the outstanding requests into failures rather than exceptions.
class SubprocessClient : public Client {
 public:
  explicit SubprocessClient(SubprocessOptions options);
  std::vector<ClientResponse> Run(const std::vector<ClientRequest>& requests) override;

 private:
  SubprocessOptions options_;
};

}  // namespace s2st::data

#endif  // S2ST_DATA_SUBPROCESS_CLIENT_H_
