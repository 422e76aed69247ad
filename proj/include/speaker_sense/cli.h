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

// Pipeline commands behind the speaker_sense binary.
//
//   perturb      corpus + pool -> <out>/variants.jsonl, <out>/run.json
//   augment      training corpus -> <out>/augmented.jsonl (originals + K-1
//                renamed copies each)
//   evaluate     variants + generations -> <out>/generations.jsonl,
//                <out>/scores.jsonl
//   sensitivity  scores -> <out>/report.{json,txt}, <out>/per_sample.csv
//                (+ <out>/trends.csv for change-one runs)
//   groups       counts table -> <out>/groups.csv
//   losscheck    recorded tensors -> L_ca, L_dh, L_total
//   report       re-render or compare report.json files
//   stub-server  local echo/constant model service

#ifndef SPEAKER_SENSE_CLI_H_
#define SPEAKER_SENSE_CLI_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace speaker_sense {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIncomplete = 3;

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t T = 5;
  std::size_t K = 2;
  std::string corpus;
  // A pool file, or "in-distribution" for the corpus's own speaker names.
  std::string pool;
  std::string mode = "change-all";
  std::vector<std::string> metrics;  // empty: rouge2, rougeL, bleu
  std::string endpoint;              // empty: $SPEAKER_SENSE_ENDPOINT
  std::string cache;                 // empty: <out>/cache.jsonl
  std::string out = ".";
  bool gender_consistent = false;

  // evaluate
  std::string variants;  // empty: <out>/variants.jsonl
  std::string model = "default";
  std::size_t parallelism = 4;
  std::string scorer_endpoint;  // for external:<id> metrics
  bool stem = false;

  // sensitivity / report
  std::string scores;  // empty: <out>/scores.jsonl
  std::string compare;
  std::size_t bootstrap_iterations = 10000;
  std::string report;

  // groups
  std::size_t group_size = 200;
  std::string frequent;
  std::size_t race_top_k = 0;  // 0: no race groups

  // losscheck
  std::vector<std::string> cross_attention;
  std::vector<std::string> decoder_hidden;
  double alpha = 1.0;
  double beta = 10.0;
  double l_gen = 0.0;
};

// Each command writes its files under config.out and a short summary to
// `log`. Library errors propagate as exceptions.
int cmd_perturb(const RunConfig& config, std::ostream& log);
int cmd_augment(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& log);
int cmd_sensitivity(const RunConfig& config, std::ostream& log);
int cmd_groups(const RunConfig& config, std::ostream& log);
int cmd_losscheck(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

// Parses argv, runs the subcommand and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_CLI_H_
