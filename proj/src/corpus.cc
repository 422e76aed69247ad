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

#include "speaker_sense/corpus.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "speaker_sense/errors.h"

namespace speaker_sense {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const json& RequireField(const json& record, const char* key,
                         const std::string& source, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw ParseError(source, line, key, "missing required field");
  }
  return *it;
}

std::string RequireString(const json& value, const std::string& field,
                          const std::string& source, std::size_t line) {
  if (!value.is_string()) {
    throw ParseError(source, line, field,
                     std::string("expected string, got ") + value.type_name());
  }
  return value.get<std::string>();
}

std::string_view TrimBlank(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "test";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw InvalidArgument("unknown split '" + std::string(name) +
                        "' (expected train, val or test)");
}

void validate_sample(const Sample& sample) {
  if (sample.id.empty()) throw InvalidArgument("sample id is empty");
  if (sample.dialogue.empty()) {
    throw InvalidArgument("sample '" + sample.id + "' has an empty dialogue");
  }
  for (std::size_t i = 0; i < sample.dialogue.size(); ++i) {
    const auto& speaker = sample.dialogue[i].speaker;
    if (speaker.empty()) {
      throw InvalidArgument("sample '" + sample.id + "' turn " +
                            std::to_string(i) + ": empty speaker");
    }
    if (speaker.find('\n') != std::string::npos ||
        speaker.find(kTurnSeparator) != std::string::npos) {
      throw InvalidArgument("sample '" + sample.id + "' turn " +
                            std::to_string(i) +
                            ": speaker contains a newline or '" +
                            std::string(1, kTurnSeparator) + "'");
    }
  }
}

Sample parse_sample(std::string_view json_line, const std::string& source,
                    std::size_t line) {
  json record;
  try {
    record = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line, "", std::string("invalid JSON: ") + e.what());
  }
  if (!record.is_object()) {
    throw ParseError(source, line, "", "record is not a JSON object");
  }

  Sample sample;
  sample.id = RequireString(RequireField(record, "id", source, line), "id",
                            source, line);
  if (sample.id.empty()) throw ParseError(source, line, "id", "empty id");

  const json& dialogue = RequireField(record, "dialogue", source, line);
  if (!dialogue.is_array() || dialogue.empty()) {
    throw ParseError(source, line, "dialogue",
                     "expected a non-empty array of turns");
  }
  for (std::size_t i = 0; i < dialogue.size(); ++i) {
    const std::string prefix = "dialogue[" + std::to_string(i) + "]";
    const json& turn = dialogue[i];
    if (!turn.is_object()) {
      throw ParseError(source, line, prefix, "turn is not an object");
    }
    Utterance u;
    const std::string speaker_field = prefix + ".speaker";
    auto sp = turn.find("speaker");
    if (sp == turn.end()) {
      throw ParseError(source, line, speaker_field, "missing required field");
    }
    u.speaker = RequireString(*sp, speaker_field, source, line);
    if (u.speaker.empty()) {
      throw ParseError(source, line, speaker_field, "empty speaker");
    }
    if (u.speaker.find('\n') != std::string::npos ||
        u.speaker.find(kTurnSeparator) != std::string::npos) {
      throw ParseError(source, line, speaker_field,
                       "speaker contains a newline or turn separator");
    }
    const std::string text_field = prefix + ".text";
    auto tx = turn.find("text");
    if (tx == turn.end()) {
      throw ParseError(source, line, text_field, "missing required field");
    }
    u.text = RequireString(*tx, text_field, source, line);
    sample.dialogue.push_back(std::move(u));
  }

  if (auto ctx = record.find("context"); ctx != record.end() && !ctx->is_null()) {
    sample.context = RequireString(*ctx, "context", source, line);
  }
  sample.reference = RequireString(
      RequireField(record, "reference", source, line), "reference", source,
      line);
  return sample;
}

std::string serialize_sample(const Sample& sample) {
  ordered_json out;
  out["id"] = sample.id;
  ordered_json turns = ordered_json::array();
  for (const auto& u : sample.dialogue) {
    ordered_json turn;
    turn["speaker"] = u.speaker;
    turn["text"] = u.text;
    turns.push_back(std::move(turn));
  }
  out["dialogue"] = std::move(turns);
  out["context"] = sample.context ? ordered_json(*sample.context)
                                  : ordered_json(nullptr);
  out["reference"] = sample.reference;
  return out.dump();
}

Corpus parse_corpus_text(std::string_view text, const CorpusFormat& format,
                         const std::string& source) {
  Corpus corpus;
  corpus.split = format.split;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view raw = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (TrimBlank(raw).empty()) continue;
    Sample sample = parse_sample(raw, source, line_no);
    if (!ids.insert(sample.id).second) {
      throw ParseError(source, line_no, "id",
                       "duplicate id '" + sample.id + "'");
    }
    corpus.samples.push_back(std::move(sample));
  }
  return corpus;
}

Corpus parse_corpus(const std::string& path, const CorpusFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "", "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_text(buf.str(), format, path);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.samples) {
    out += serialize_sample(s);
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << serialize_corpus(corpus);
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<std::string> extract_speakers(std::span<const Utterance> dialogue) {
  std::vector<std::string> speakers;
  std::unordered_set<std::string> seen;
  for (const auto& u : dialogue) {
    if (seen.insert(u.speaker).second) speakers.push_back(u.speaker);
  }
  return speakers;
}

std::set<std::string> detect_mentions(const Sample& sample,
                                      const NameMatcher& lexicon) {
  std::set<std::string> found;
  auto scan = [&](std::string_view text) {
    for (const auto& m : lexicon.find_all(text)) {
      found.insert(lexicon.names()[m.name_index]);
    }
  };
  for (const auto& u : sample.dialogue) scan(u.text);
  if (sample.context) scan(*sample.context);
  return found;
}

std::set<std::string> detect_mentions(const Sample& sample,
                                      std::span<const std::string> lexicon) {
  return detect_mentions(sample, NameMatcher(lexicon));
}

std::string flatten_dialogue(std::span<const Utterance> dialogue) {
  std::string out;
  for (std::size_t i = 0; i < dialogue.size(); ++i) {
    if (i > 0) out += '\n';
    out += dialogue[i].speaker;
    out += kTurnSeparator;
    out += ' ';
    out += dialogue[i].text;
  }
  return out;
}

}  // namespace speaker_sense
