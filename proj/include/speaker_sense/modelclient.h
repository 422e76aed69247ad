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

// Generations for perturbed variants from an HTTP model service, with a
// persistent append-only cache.
//
// Wire contract:
//   POST <endpoint>/generate
//   {"model": str, "dialogue": [{"speaker", "text"}...], "context": str|null}
//   -> {"output": str}

#ifndef SPEAKER_SENSE_MODELCLIENT_H_
#define SPEAKER_SENSE_MODELCLIENT_H_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speaker_sense/corpus.h"
#include "speaker_sense/perturb.h"
#include "speaker_sense/retry.h"

namespace speaker_sense {

inline constexpr char kEndpointEnvVar[] = "SPEAKER_SENSE_ENDPOINT";

// The flag value when non-empty, else $SPEAKER_SENSE_ENDPOINT, else "".
std::string resolve_endpoint(std::string_view flag_value);

struct GenerationRecord {
  std::string sample_id;
  std::string variant_id;
  std::string raw_output;
  std::string back_substituted;
  std::string model;
  std::string timestamp;  // UTC, ISO 8601
};

// SHA-256 (hex) of the canonical JSON {"dialogue", "context"} of a variant.
// The reference is not part of the request and not part of the key.
std::string variant_content_key(const Sample& sample);

class ModelClient {
 public:
  ModelClient(std::string endpoint, std::string model, RetryPolicy retry = {});

  const std::string& endpoint() const { return endpoint_; }
  const std::string& model() const { return model_; }

  // Returns the service's text verbatim. Throws RetriableError after the
  // configured attempts and ProtocolError on a reply without a string
  // "output".
  std::string generate(const Sample& variant) const;

 private:
  std::string endpoint_;
  std::string model_;
  RetryPolicy retry_;
};

// Append-only JSON Lines file keyed by (model, content key):
//   {"model", "key", "sample_id", "variant_id", "output", "timestamp"}
// A torn final line (from a crash mid-write) is ignored on load.
class GenerationCache {
 public:
  struct Entry {
    std::string output;
    std::string timestamp;
  };

  // Loads `path` if it exists. An empty path gives a memory-only cache.
  explicit GenerationCache(std::string path);

  std::optional<Entry> lookup(const std::string& model,
                              const std::string& key) const;
  // Appends and flushes one entry. Thread-safe.
  void insert(const std::string& model, const std::string& key,
              const GenerationRecord& record);
  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::shared_mutex mu_;
  std::map<std::pair<std::string, std::string>, Entry> index_;
  std::ofstream out_;
  bool needs_newline_ = false;
};

// Produces the raw output for one variant sample.
using Generator = std::function<std::string(const Sample&)>;

struct BatchOptions {
  std::string model = "default";
  std::size_t parallelism = 4;
};

struct BatchFailure {
  std::string sample_id;
  std::string variant_id;
  std::string error;
};

struct BatchResult {
  // One entry per input variant, in input order; empty where generation
  // failed.
  std::vector<std::optional<GenerationRecord>> records;
  std::vector<BatchFailure> failures;
  std::size_t requests = 0;    // generator calls made
  std::size_t cache_hits = 0;  // variants answered from the cache

  bool complete() const { return failures.empty(); }
};

// Generates every variant of every set. Cached variants are never passed to
// `generate`; variants with identical content share one call. At most
// `parallelism` calls run at once. A null `generate` makes every uncached
// variant a failure. Completed generations are written to the cache as they
// arrive.
BatchResult run_batch(std::span<const PerturbationSet> sets,
                      const Generator& generate, GenerationCache& cache,
                      const BatchOptions& options = {});

std::string serialize_generation_record(const GenerationRecord& record);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_MODELCLIENT_H_
