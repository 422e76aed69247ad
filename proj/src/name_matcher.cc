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

#include "speaker_sense/name_matcher.h"

#include <algorithm>

#include "utf8.h"

namespace speaker_sense {
namespace {

bool IsAsciiNameChar(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '\'' || c == '_' || c == '-';
}

// Per-byte name-character classification; every byte of a multi-byte code
// point shares the class of the code point.
std::vector<bool> ClassifyBytes(std::string_view text) {
  std::vector<bool> cls(text.size(), false);
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      cls[i] = IsAsciiNameChar(c);
      ++i;
      continue;
    }
    std::size_t len = 1;
    const char32_t cp = internal::DecodeUtf8(text, i, &len);
    const bool is_name = internal::IsWordCodePoint(cp);
    for (std::size_t k = 0; k < len; ++k) cls[i + k] = is_name;
    i += len;
  }
  return cls;
}

bool IsSingleToken(const std::string& name) {
  const auto cls = ClassifyBytes(name);
  return std::all_of(cls.begin(), cls.end(), [](bool b) { return b; });
}

// True if a name ending at `end` (exclusive) is followed by a boundary.
bool TrailingBoundary(std::string_view text, const std::vector<bool>& cls,
                      std::size_t end) {
  if (end >= text.size() || !cls[end]) return true;
  if (text[end] != '\'') return false;
  // Possessive: "'" or "'s" followed by a non-name character.
  const std::size_t after = end + 1;
  if (after >= text.size() || !cls[after]) return true;
  if (text[after] == 's' &&
      (after + 1 >= text.size() || !cls[after + 1])) {
    return true;
  }
  return false;
}

}  // namespace

NameMatcher::NameMatcher(std::span<const std::string> names) {
  for (const auto& name : names) {
    if (name.empty()) continue;
    if (single_token_.contains(name)) continue;
    const bool seen_multi =
        std::any_of(multi_token_.begin(), multi_token_.end(),
                    [&](std::size_t idx) { return names_[idx] == name; });
    if (seen_multi) continue;
    const std::size_t idx = names_.size();
    names_.push_back(name);
    if (IsSingleToken(name)) {
      single_token_.emplace(name, idx);
    } else {
      multi_token_.push_back(idx);
    }
  }
}

std::vector<NameMatcher::Match> NameMatcher::find_all(
    std::string_view text) const {
  std::vector<Match> matches;
  if (names_.empty() || text.empty()) return matches;
  const auto cls = ClassifyBytes(text);

  std::size_t i = 0;
  while (i < text.size()) {
    if (!cls[i] || (i > 0 && cls[i - 1])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < text.size() && cls[run_end]) ++run_end;

    std::size_t best_end = 0;
    std::size_t best_idx = 0;
    auto consider = [&](std::size_t end, std::size_t idx) {
      if (end > best_end) {
        best_end = end;
        best_idx = idx;
      }
    };

    const std::string_view run = text.substr(i, run_end - i);
    if (auto it = single_token_.find(std::string(run));
        it != single_token_.end()) {
      consider(run_end, it->second);
    } else if (run.size() > 2 && run.ends_with("'s")) {
      if (auto it2 = single_token_.find(std::string(run.substr(0, run.size() - 2)));
          it2 != single_token_.end()) {
        consider(run_end - 2, it2->second);
      }
    } else if (run.size() > 1 && run.ends_with('\'')) {
      if (auto it2 = single_token_.find(std::string(run.substr(0, run.size() - 1)));
          it2 != single_token_.end()) {
        consider(run_end - 1, it2->second);
      }
    }
    for (std::size_t idx : multi_token_) {
      const std::string& name = names_[idx];
      if (text.substr(i).starts_with(name) &&
          TrailingBoundary(text, cls, i + name.size())) {
        consider(i + name.size(), idx);
      }
    }

    if (best_end > 0) {
      matches.push_back({i, best_end, best_idx});
      i = best_end;
    } else {
      i = run_end;
    }
  }
  return matches;
}

std::string substitute_names(
    std::string_view text, const NameMatcher& matcher,
    std::span<const std::string> replacement_by_index) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (const auto& m : matcher.find_all(text)) {
    out.append(text.substr(pos, m.begin - pos));
    out.append(replacement_by_index[m.name_index]);
    pos = m.end;
  }
  out.append(text.substr(pos));
  return out;
}

std::string substitute_names(
    std::string_view text,
    const std::map<std::string, std::string>& replacements) {
  std::vector<std::string> keys;
  std::vector<std::string> values;
  for (const auto& [from, to] : replacements) {
    if (from.empty()) continue;
    keys.push_back(from);
    values.push_back(to);
  }
  return substitute_names(text, NameMatcher(keys), values);
}

}  // namespace speaker_sense
