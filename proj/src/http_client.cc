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

#include "http_client.h"

#include <cmath>
#include <thread>

#include "httplib.h"
#include "speaker_sense/errors.h"

namespace speaker_sense::internal {

Endpoint ParseEndpoint(std::string_view url) {
  std::string rest(url);
  if (rest.empty()) throw InvalidArgument("empty endpoint URL");
  if (rest.starts_with("https://")) {
    throw InvalidArgument("https endpoints are not supported: " + rest);
  }
  if (rest.starts_with("http://")) rest = rest.substr(7);
  if (rest.empty()) throw InvalidArgument("endpoint URL has no host");

  Endpoint ep;
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) {
    ep.base_path = rest.substr(slash);
    while (!ep.base_path.empty() && ep.base_path.back() == '/') {
      ep.base_path.pop_back();
    }
  }
  if (authority.empty()) throw InvalidArgument("endpoint URL has no host");
  ep.scheme_host_port = "http://" + authority;
  return ep;
}

nlohmann::json PostJson(const Endpoint& endpoint, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& retry) {
  const std::string full_path = endpoint.base_path + path;
  const std::string payload = body.dump();
  const int attempts = std::max(1, retry.max_attempts);
  std::string last_error;

  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      const double factor = std::pow(retry.backoff_multiplier, attempt - 1);
      std::this_thread::sleep_for(std::chrono::milliseconds(
          static_cast<long long>(retry.initial_backoff.count() * factor)));
    }
    httplib::Client client(endpoint.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
        retry.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        retry.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(full_path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProtocolError("POST " + endpoint.scheme_host_port + full_path +
                          " returned HTTP " + std::to_string(res->status));
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw ProtocolError("POST " + endpoint.scheme_host_port + full_path +
                          " returned a non-JSON body");
    }
  }
  throw RetriableError("POST " + endpoint.scheme_host_port + full_path +
                       " failed after " + std::to_string(attempts) +
                       " attempt(s): " + last_error);
}

}  // namespace speaker_sense::internal
