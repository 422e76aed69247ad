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

#include "speaker_sense/stub_server.h"

#include <atomic>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "speaker_sense/corpus.h"
#include "speaker_sense/errors.h"

namespace speaker_sense {

using json = nlohmann::json;

struct StubServer::Impl {
  StubOptions options;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> in_flight{0};
  std::atomic<std::size_t> max_in_flight{0};

  void Install() {
    server.Post("/generate", [this](const httplib::Request& req,
                                    httplib::Response& res) {
      const std::size_t n = requests.fetch_add(1);
      const std::size_t now = in_flight.fetch_add(1) + 1;
      std::size_t peak = max_in_flight.load();
      while (now > peak && !max_in_flight.compare_exchange_weak(peak, now)) {
      }
      if (options.delay.count() > 0) std::this_thread::sleep_for(options.delay);
      in_flight.fetch_sub(1);

      if (n < options.fail_first) {
        res.status = 503;
        return;
      }
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        res.status = 400;
        return;
      }
      std::string output = options.constant;
      if (options.mode == StubMode::kEcho) {
        std::vector<Utterance> dialogue;
        try {
          for (const auto& turn : body.at("dialogue")) {
            dialogue.push_back({turn.at("speaker").get<std::string>(),
                                turn.at("text").get<std::string>()});
          }
        } catch (const json::exception&) {
          res.status = 400;
          return;
        }
        output = flatten_dialogue(dialogue);
      }
      res.set_content(json{{"output", output}}.dump(), "application/json");
    });
    server.Post("/score", [](const httplib::Request& req,
                             httplib::Response& res) {
      try {
        const json body = json::parse(req.body);
        const bool same = body.at("candidate").get<std::string>() ==
                          body.at("reference").get<std::string>();
        res.set_content(json{{"score", same ? 1.0 : 0.0}}.dump(),
                        "application/json");
      } catch (const json::exception&) {
        res.status = 400;
      }
    });
  }
};

StubMode parse_stub_mode(std::string_view name) {
  if (name == "echo") return StubMode::kEcho;
  if (name == "constant") return StubMode::kConstant;
  throw InvalidArgument("unknown stub mode '" + std::string(name) +
                        "' (expected echo or constant)");
}

StubServer::StubServer(StubOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->Install();
}

StubServer::~StubServer() { stop(); }

int StubServer::start(const std::string& host, int port) {
  impl_->host = host;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    impl_->port = port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) {
    throw Error("stub server cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void StubServer::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    throw Error("stub server cannot listen on " + host + ":" +
                std::to_string(port));
  }
}

void StubServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string StubServer::endpoint() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port);
}

std::size_t StubServer::requests() const { return impl_->requests.load(); }

std::size_t StubServer::max_in_flight() const {
  return impl_->max_in_flight.load();
}

}  // namespace speaker_sense
