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

// Speaker-name sensitivity statistics over T name-substituted variants of a
// sample, given the back-substituted generations o^t and the reference o:
//
//   S = mean over ordered pairs t1 != t2 of 1 - Score(o^t1, o^t2)
//   R = max_t Score(o, o^t) - min_t Score(o, o^t)
//   D = population standard deviation of Score(o, o^t) over t
//
// Corpus-level numbers are macro averages over samples.

#ifndef SPEAKER_SENSE_SENSITIVITY_H_
#define SPEAKER_SENSE_SENSITIVITY_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speaker_sense/corpus.h"
#include "speaker_sense/metrics.h"

namespace speaker_sense {

struct VariantScores {
  std::string sample_id;
  // Target speaker for change-one runs; empty otherwise.
  std::string group;
  std::string metric_id;
  bool symmetric = true;
  std::vector<std::string> variant_ids;
  // Score(candidate = o^t, reference = o).
  std::vector<double> vs_reference;
  // pairwise[i][j] = Score(candidate = o^i, reference = o^j); diagonal unused.
  std::vector<std::vector<double>> pairwise;
};

// Scores T back-substituted outputs against the original reference and
// against each other.
VariantScores score_variants(const std::string& sample_id,
                             const std::string& group, const Metric& metric,
                             std::span<const std::string> variant_ids,
                             std::span<const std::string> outputs,
                             std::string_view reference);

// Throws InvalidArgument when T < 2, the matrix is not T x T, or a metric
// declared symmetric produced an asymmetric matrix.
double pairwise_sensitivity(const VariantScores& vs);
double score_range(std::span<const double> vs_reference);
double score_deviation(std::span<const double> vs_reference);
inline double score_range(const VariantScores& vs) {
  return score_range(vs.vs_reference);
}
inline double score_deviation(const VariantScores& vs) {
  return score_deviation(vs.vs_reference);
}

struct MetricSensitivity {
  double mean = 0.0;  // plain metric mean of Score(o, o^t)
  double s = 0.0;
  double r = 0.0;
  double d = 0.0;
};

struct SampleRecord {
  std::string sample_id;
  std::string group;
  std::map<std::string, MetricSensitivity> metrics;
};

// One record from the per-metric scores of a single sample (all entries must
// share sample_id and group).
SampleRecord sensitivity_record(std::span<const VariantScores> per_metric);

struct RunMetadata {
  std::string pool_label;
  std::uint64_t seed = 0;
  std::size_t variants_per_sample = 0;  // T
  std::string mode;
};

// p-values keyed by metric, then by statistic ("mean", "S", "R", "D").
using SignificanceTable = std::map<std::string, std::map<std::string, double>>;

struct SensitivityReport {
  RunMetadata meta;
  std::vector<std::string> metric_ids;
  std::vector<SampleRecord> samples;
  std::map<std::string, MetricSensitivity> macro;
  std::optional<SignificanceTable> significance;
};

// Macro averages of every field over `records`. Throws InvalidArgument when
// empty or when records disagree on the metric set.
SensitivityReport aggregate_report(std::vector<SampleRecord> records,
                                   RunMetadata meta = {});

// Two-sided paired bootstrap over per-sample differences d = a - b:
// p = (1 + #{|mean(d*) - mean(d)| >= |mean(d)|}) / (1 + iterations).
double paired_significance(std::span<const double> system_a,
                           std::span<const double> system_b,
                           std::size_t iterations, std::uint64_t seed);

// Per-metric, per-statistic p-values for two reports over the same samples
// (matched by sample id and group).
SignificanceTable compare_reports(const SensitivityReport& a,
                                  const SensitivityReport& b,
                                  std::size_t iterations, std::uint64_t seed);

struct SpeakerFeature {
  std::string speaker;
  std::size_t first_index = 0;  // 0-based turn of the first utterance
  std::size_t utterance_count = 0;
};

std::vector<SpeakerFeature> speaker_features(std::span<const Utterance> dialogue);

struct ChangeOneRecord {
  std::string sample_id;
  SpeakerFeature feature;
  double value = 0.0;  // e.g. D for one metric
};

// Bins given by ascending lower bounds; the last bin is open-ended.
struct TrendBins {
  std::vector<std::size_t> first_index = {0, 1, 2, 3};
  std::vector<std::size_t> utterance_count = {1, 3, 6, 11};
};

struct TrendRow {
  std::string feature;  // "first_index" or "utterance_count"
  std::string bin;      // e.g. "0", "3+", "1-2"
  double mean = 0.0;
  std::size_t count = 0;
};

// Mean value per bin for both features; empty bins are omitted.
std::vector<TrendRow> speaker_trends(std::span<const ChangeOneRecord> records,
                                     const TrendBins& bins = {});

// Serialization.
std::string serialize_variant_scores(const VariantScores& vs);
std::vector<VariantScores> parse_variant_scores(std::string_view text,
                                                const std::string& source);
std::string report_to_json(const SensitivityReport& report);
SensitivityReport report_from_json(std::string_view text,
                                   const std::string& source);
// Aligned columns, values x100 with two decimals.
std::string report_to_table(const SensitivityReport& report);
std::string report_to_csv(const SensitivityReport& report);
std::string trends_to_csv(std::span<const TrendRow> rows);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_SENSITIVITY_H_
