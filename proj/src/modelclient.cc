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

#include "speaker_sense/modelclient.h"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iterator>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "http_client.h"
#include "json.hpp"
#include "speaker_sense/errors.h"

namespace speaker_sense {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ordered_json DialogueJson(const Sample& sample) {
  ordered_json turns = ordered_json::array();
  for (const auto& u : sample.dialogue) {
    ordered_json turn;
    turn["speaker"] = u.speaker;
    turn["text"] = u.text;
    turns.push_back(turn);
  }
  return turns;
}

ordered_json ContextJson(const Sample& sample) {
  return sample.context ? ordered_json(*sample.context) : ordered_json(nullptr);
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string resolve_endpoint(std::string_view flag_value) {
  if (!flag_value.empty()) return std::string(flag_value);
  if (const char* env = std::getenv(kEndpointEnvVar); env != nullptr) {
    return env;
  }
  return "";
}

std::string variant_content_key(const Sample& sample) {
  ordered_json j;
  j["dialogue"] = DialogueJson(sample);
  j["context"] = ContextJson(sample);
  return Sha256Hex(j.dump());
}

ModelClient::ModelClient(std::string endpoint, std::string model,
                         RetryPolicy retry)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      retry_(retry) {
  internal::ParseEndpoint(endpoint_);  // validate early
}

std::string ModelClient::generate(const Sample& variant) const {
  ordered_json body;
  body["model"] = model_;
  body["dialogue"] = DialogueJson(variant);
  body["context"] = ContextJson(variant);
  const json reply =
      internal::PostJson(internal::ParseEndpoint(endpoint_), "/generate",
                         json(body), retry_);
  if (!reply.is_object() || !reply.contains("output") ||
      !reply.at("output").is_string()) {
    throw ProtocolError("generate reply for '" + variant.id +
                        "' lacks a string \"output\"");
  }
  return reply.at("output").get<std::string>();
}

GenerationCache::GenerationCache(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw Error("cannot read cache " + path_);
    const std::string text{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    std::size_t pos = 0, line_no = 0;
    std::size_t keep = text.size();
    while (pos < text.size()) {
      const std::size_t start = pos;
      const std::size_t eol = text.find('\n', pos);
      const bool last = eol == std::string::npos;
      const std::string_view line(text.data() + pos,
                                  (last ? text.size() : eol) - pos);
      pos = last ? text.size() : eol + 1;
      ++line_no;
      if (line.empty()) continue;
      try {
        const json j = json::parse(line);
        index_[{j.at("model").get<std::string>(), j.at("key").get<std::string>()}] =
            {j.at("output").get<std::string>(), j.value("timestamp", "")};
      } catch (const json::exception& e) {
        if (!last) throw ParseError(path_, line_no, "", e.what());
        keep = start;  // torn tail from an interrupted write
      }
    }
    if (keep < text.size()) {
      in.close();
      std::filesystem::resize_file(path_, keep);
    }
    needs_newline_ = keep > 0 && text[keep - 1] != '\n';
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error("cannot open cache " + path_ + " for appending");
}

std::optional<GenerationCache::Entry> GenerationCache::lookup(
    const std::string& model, const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = index_.find({model, key});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void GenerationCache::insert(const std::string& model, const std::string& key,
                             const GenerationRecord& record) {
  ordered_json j;
  j["model"] = model;
  j["key"] = key;
  j["sample_id"] = record.sample_id;
  j["variant_id"] = record.variant_id;
  j["output"] = record.raw_output;
  j["timestamp"] = record.timestamp;
  std::unique_lock lock(mu_);
  index_[{model, key}] = {record.raw_output, record.timestamp};
  if (!out_.is_open()) return;
  if (needs_newline_) {
    out_ << '\n';
    needs_newline_ = false;
  }
  out_ << j.dump() << '\n';
  out_.flush();
  if (!out_) throw Error("failed appending to cache " + path_);
}

std::size_t GenerationCache::size() const {
  std::shared_lock lock(mu_);
  return index_.size();
}

BatchResult run_batch(std::span<const PerturbationSet> sets,
                      const Generator& generate, GenerationCache& cache,
                      const BatchOptions& options) {
  struct Item {
    const PerturbationSet* set;
    const Variant* variant;
    std::string key;
  };
  std::vector<Item> items;
  for (const auto& set : sets) {
    for (const auto& v : set.variants) {
      items.push_back({&set, &v, variant_content_key(v.sample)});
    }
  }

  BatchResult result;
  result.records.resize(items.size());

  // Distinct uncached keys, each answered by one call on its first variant.
  struct Job {
    std::size_t first_item;
    std::optional<std::string> output;
    std::string timestamp;
    std::string error;
  };
  std::vector<Job> jobs;
  std::unordered_map<std::string, std::size_t> job_of_key;
  std::vector<std::optional<GenerationCache::Entry>> cached(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    cached[i] = cache.lookup(options.model, items[i].key);
    if (cached[i]) {
      ++result.cache_hits;
      continue;
    }
    if (job_of_key.emplace(items[i].key, jobs.size()).second) {
      jobs.push_back({i, std::nullopt, "", ""});
    }
  }

  if (!jobs.empty() && generate) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= jobs.size()) return;
        Job& job = jobs[j];
        const Item& item = items[job.first_item];
        try {
          std::string out = generate(item.variant->sample);
          GenerationRecord rec;
          rec.sample_id = item.set->sample_id;
          rec.variant_id = item.variant->variant_id;
          rec.raw_output = out;
          rec.model = options.model;
          rec.timestamp = UtcNow();
          cache.insert(options.model, item.key, rec);
          job.timestamp = rec.timestamp;
          job.output = std::move(out);
        } catch (const std::exception& e) {
          job.error = e.what();
        }
      }
    };
    const std::size_t threads =
        std::min(std::max<std::size_t>(1, options.parallelism), jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    result.requests = jobs.size();
  }

  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& item = items[i];
    std::optional<std::string> output;
    std::string timestamp;
    std::string error = "no generator available and no cached output";
    if (cached[i]) {
      output = cached[i]->output;
      timestamp = cached[i]->timestamp;
    } else {
      const Job& job = jobs[job_of_key.at(item.key)];
      if (job.output) {
        output = job.output;
        timestamp = job.timestamp;
      } else if (generate) {
        error = job.error;
      }
    }
    if (!output) {
      result.failures.push_back(
          {item.set->sample_id, item.variant->variant_id, error});
      continue;
    }
    GenerationRecord rec;
    rec.sample_id = item.set->sample_id;
    rec.variant_id = item.variant->variant_id;
    rec.raw_output = *output;
    rec.back_substituted = back_substitute(*output, item.variant->mapping);
    rec.model = options.model;
    rec.timestamp = std::move(timestamp);
    result.records[i] = std::move(rec);
  }
  return result;
}

std::string serialize_generation_record(const GenerationRecord& record) {
  ordered_json j;
  j["sample_id"] = record.sample_id;
  j["variant_id"] = record.variant_id;
  j["model"] = record.model;
  j["raw_output"] = record.raw_output;
  j["back_substituted"] = record.back_substituted;
  j["timestamp"] = record.timestamp;
  return j.dump();
}

}  // namespace speaker_sense
