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

#ifndef SPEAKER_SENSE_RETRY_H_
#define SPEAKER_SENSE_RETRY_H_

#include <chrono>

namespace speaker_sense {

// Exponential backoff for HTTP calls: attempt i (0-based) waits
// initial_backoff * backoff_multiplier^(i-1) before being sent.
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  double backoff_multiplier = 2.0;
  std::chrono::milliseconds timeout{30000};
};

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_RETRY_H_
