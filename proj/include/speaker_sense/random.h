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

// Deterministic seeding and bounded draws.
//
// Draws use std::mt19937_64, whose output sequence is fixed by the standard,
// and a rejection-based bounded draw instead of
// std::uniform_int_distribution (whose algorithm is implementation-defined),
// so results are identical across platforms and standard libraries.

#ifndef SPEAKER_SENSE_RANDOM_H_
#define SPEAKER_SENSE_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace speaker_sense {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);
// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// mix64(mix64(mix64(mix64(global) ^ fnv1a64(id)) ^ index) ^ stream)
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view sample_id,
                          std::uint64_t index, std::uint64_t stream = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, n). Rejects the low (2^64 mod n) outputs so every value is
  // equally likely. Requires n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_RANDOM_H_
