// Copyright 2026 The Speaker Sense Authors.
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

// Deterministic local stand-in for a model service, for tests and desk runs.
//
//   POST /generate  echo: the dialogue as "speaker: text" lines
//                   constant: a fixed string
//   POST /score     1 when candidate == reference, else 0

#ifndef SPEAKER_SENSE_STUB_SERVER_H_
#define SPEAKER_SENSE_STUB_SERVER_H_

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace speaker_sense {

enum class StubMode { kEcho, kConstant };
StubMode parse_stub_mode(std::string_view name);

struct StubOptions {
  StubMode mode = StubMode::kEcho;
  std::string constant = "ok";
  // Per-request delay, to make concurrency observable.
  std::chrono::milliseconds delay{0};
  // The first `fail_first` requests get HTTP 503.
  std::size_t fail_first = 0;
};

class StubServer {
 public:
  explicit StubServer(StubOptions options = {});
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  std::string endpoint() const;
  std::size_t requests() const;       // /generate requests received
  std::size_t max_in_flight() const;  // peak concurrent /generate requests

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_STUB_SERVER_H_
