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

#ifndef SPEAKER_SENSE_SRC_HTTP_CLIENT_H_
#define SPEAKER_SENSE_SRC_HTTP_CLIENT_H_

#include <string>
#include <string_view>

#include "json.hpp"
#include "speaker_sense/retry.h"

namespace speaker_sense::internal {

struct Endpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string base_path;         // "" or "/prefix" (no trailing slash)
};

// Accepts "http://host[:port][/prefix]" and "host:port". Throws
// InvalidArgument otherwise.
Endpoint ParseEndpoint(std::string_view url);

// POSTs `body` as JSON to endpoint + path with exponential backoff on
// connection failures, timeouts and 5xx replies. Throws RetriableError when
// attempts run out, ProtocolError on 4xx or a non-JSON body.
nlohmann::json PostJson(const Endpoint& endpoint, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& retry);

}  // namespace speaker_sense::internal

#endif  // SPEAKER_SENSE_SRC_HTTP_CLIENT_H_
