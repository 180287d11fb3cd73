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

#include "s2st/data/subprocess_client.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <condition_variable>
#include <thread>

#include "s2st/common/error.h"

namespace s2st::data {

namespace {

// Window of unanswered requests shared by the writer and reader threads.
class Window {
 public:
  explicit Window(int capacity) : free_(capacity) {}

  // False once aborted.
  bool Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0 || aborted_; });
    if (aborted_) return false;
    --free_;
    return true;
  }
  void Release() {
    std::lock_guard lock(mu_);
    ++free_;
    cv_.notify_all();
  }
  void Abort() {
    std::lock_guard lock(mu_);
    aborted_ = true;
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int free_;
  bool aborted_ = false;
};

bool WriteAll(int fd, const std::string& data) {
  size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<size_t>(n);
  }
  return true;
}

}  // namespace

SubprocessClient::SubprocessClient(SubprocessOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw ConfigError("subprocess client: empty command");
  if (options_.max_in_flight < 1) {
    throw ConfigError("subprocess client: max_in_flight must be >= 1");
  }
}

std::vector<ClientResponse> SubprocessClient::Run(const std::vector<ClientRequest>& requests) {
  if (requests.empty()) return {};
  int to_child[2], from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0) {
    throw ClientError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw ClientError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  // A dead child must surface as EPIPE on write, not as a signal.
  struct sigaction ignore {};
  struct sigaction previous {};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &previous);

  Window window(options_.max_in_flight);
  const int write_fd = to_child[1];
  std::thread writer([&] {
    for (const ClientRequest& r : requests) {
      if (!window.Acquire()) break;
      if (!WriteAll(write_fd, r.ToJson().dump() + "\n")) break;
    }
    ::close(write_fd);
  });

  std::vector<ClientResponse> responses;
  std::string buffer;
  const int read_fd = from_child[0];
  const int timeout_ms = static_cast<int>(options_.idle_timeout_seconds * 1000.0);
  char chunk[4096];
  while (responses.size() < requests.size()) {
    pollfd pfd{read_fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) break;  // idle timeout or poll failure
    const ssize_t n = ::read(read_fd, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;  // child closed stdout
    buffer.append(chunk, static_cast<size_t>(n));
    size_t newline;
    while ((newline = buffer.find('\n')) != std::string::npos) {
      const std::string line = buffer.substr(0, newline);
      buffer.erase(0, newline + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        responses.push_back(ClientResponse::FromJson(nlohmann::json::parse(line)));
      } catch (const std::exception&) {
        continue;  // unparseable output lines are ignored
      }
      window.Release();
    }
  }
  window.Abort();
  writer.join();
  ::close(read_fd);

  int status = 0;
  bool exited = false;
  for (int i = 0; i < 50 && !exited; ++i) {
    if (::waitpid(pid, &status, WNOHANG) == pid) {
      exited = true;
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  if (!exited) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &status, 0);
  }
  ::sigaction(SIGPIPE, &previous, nullptr);
  return responses;
}

}  // namespace s2st::data
