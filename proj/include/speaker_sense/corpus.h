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

// Dialogue data model and the JSON Lines dataset format.
//
// One record per line:
//   {"id": "...", "dialogue": [{"speaker": "...", "text": "..."}, ...],
//    "context": "..." | null, "reference": "..."}
// `context` may be omitted on input. Canonical output always writes the four
// keys in the order above, with a null context when absent.

#ifndef SPEAKER_SENSE_CORPUS_H_
#define SPEAKER_SENSE_CORPUS_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speaker_sense/name_matcher.h"

namespace speaker_sense {

// Separator between speaker and text when a dialogue is flattened to text.
inline constexpr char kTurnSeparator = ':';

struct Utterance {
  std::string speaker;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

struct Sample {
  std::string id;
  std::vector<Utterance> dialogue;
  std::optional<std::string> context;
  std::string reference;

  bool operator==(const Sample&) const = default;
};

enum class Split { kTrain, kVal, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct Corpus {
  std::vector<Sample> samples;
  Split split = Split::kTest;

  bool operator==(const Corpus&) const = default;
};

struct CorpusFormat {
  Split split = Split::kTest;
};

// Throws InvalidArgument if `sample` violates the Sample/Utterance
// invariants (empty dialogue, empty speaker, separator in speaker, ...).
void validate_sample(const Sample& sample);

// Parses one JSON record. `line` is only used for error messages.
Sample parse_sample(std::string_view json_line, const std::string& source = "",
                   std::size_t line = 0);

// Canonical single-line serialization (no trailing newline).
std::string serialize_sample(const Sample& sample);

// Reads a JSON Lines corpus. Blank lines are skipped. Throws ParseError
// naming the line and offending field for malformed records and for
// duplicate ids.
Corpus parse_corpus(const std::string& path, const CorpusFormat& format = {});
Corpus parse_corpus_text(std::string_view text, const CorpusFormat& format = {},
                       const std::string& source = "<memory>");

std::string serialize_corpus(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::string& path);

// Distinct speakers ordered by first turn.
std::vector<std::string> extract_speakers(std::span<const Utterance> dialogue);

// Lexicon names occurring at word boundaries in any utterance text or the
// context. Speaker fields themselves are not scanned.
std::set<std::string> detect_mentions(const Sample& sample,
                                      const NameMatcher& lexicon);
std::set<std::string> detect_mentions(const Sample& sample,
                                      std::span<const std::string> lexicon);

// "speaker: text" lines joined by '\n'.
std::string flatten_dialogue(std::span<const Utterance> dialogue);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_CORPUS_H_
