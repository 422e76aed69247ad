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

// Text-overlap quality scores used as Score(.) by the sensitivity statistics.
// All scores lie in [0, 1].

#ifndef SPEAKER_SENSE_METRICS_H_
#define SPEAKER_SENSE_METRICS_H_

#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "speaker_sense/retry.h"

namespace speaker_sense {

using TokenSeq = std::vector<std::string>;

struct TokenizerConfig {
  // Porter-stem tokens longer than three characters.
  bool stem = false;
};

// Lowercases, then splits on maximal runs of non-alphanumeric characters.
// Non-ASCII letters count as alphanumeric; Unicode punctuation, symbols and
// emoji do not.
TokenSeq tokenize(std::string_view text, const TokenizerConfig& config = {});

// Classic Porter (1980) stemmer for lowercase ASCII words. Words containing
// other characters are returned unchanged.
std::string porter_stem(std::string_view word);

// Clipped n-gram overlap F1. 0 when either side has no n-grams.
double rouge_n_f1(std::span<const std::string> candidate,
                  std::span<const std::string> reference, std::size_t n);
double rouge_n_f1(std::string_view candidate, std::string_view reference,
                  std::size_t n, const TokenizerConfig& config = {});

// Longest-common-subsequence F1.
double rouge_l_f1(std::span<const std::string> candidate,
                  std::span<const std::string> reference);
double rouge_l_f1(std::string_view candidate, std::string_view reference,
                  const TokenizerConfig& config = {});

// Sentence BLEU: geometric mean of modified n-gram precisions for orders
// 1..min(max_order, |candidate|), with an order that has no match smoothed to
// 1 / (2 * candidate n-gram count), times the brevity penalty
// exp(1 - |ref| / |cand|) when the candidate is shorter. 0 when either side
// is empty.
double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, std::size_t max_order = 4);
double bleu(std::string_view candidate, std::string_view reference,
            std::size_t max_order = 4, const TokenizerConfig& config = {});

// Score(candidate, reference) under a named metric.
class Metric {
 public:
  virtual ~Metric() = default;
  virtual const std::string& id() const = 0;
  // Score(a, b) == Score(b, a) for every input.
  virtual bool symmetric() const = 0;
  virtual double score(std::string_view candidate,
                       std::string_view reference) const = 0;
};

// Client for a model-based scorer behind HTTP:
//   POST <endpoint>/score {"scorer": id, "candidate": ..., "reference": ...}
//   -> {"score": number}
// Results are clamped to [0, 1] and cached by (candidate, reference, scorer).
class ExternalScorer {
 public:
  ExternalScorer(std::string endpoint, std::string scorer_id,
                 RetryPolicy retry = {});

  const std::string& endpoint() const { return endpoint_; }
  const std::string& scorer_id() const { return scorer_id_; }

  // Throws RetriableError once the configured attempts are exhausted on
  // transport failures or 5xx replies, and ProtocolError on a reply without a
  // numeric "score".
  double score(std::string_view candidate, std::string_view reference);

  std::size_t cache_size() const;
  std::size_t requests_sent() const;

 private:
  std::string endpoint_;
  std::string scorer_id_;
  RetryPolicy retry_;
  mutable std::shared_mutex mu_;
  std::map<std::tuple<std::string, std::string>, double> cache_;
  std::size_t requests_ = 0;
};

double external_score(std::string_view candidate, std::string_view reference,
                      ExternalScorer& scorer);

// Metric names: "rouge1".."rouge4", "rougeL", "bleu", and "external:<id>"
// (which requires `scorer_endpoint`). Throws InvalidArgument on unknown
// names.
std::unique_ptr<Metric> make_metric(std::string_view name,
                                    const TokenizerConfig& config = {},
                                    const std::string& scorer_endpoint = "");

// The built-in metric names, in report order.
std::vector<std::string> default_metric_names();

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_METRICS_H_
