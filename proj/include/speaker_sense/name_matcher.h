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

// Case-sensitive, word-boundary name matching.
//
// A name character is an ASCII letter, digit, one of ' _ -, or any non-ASCII
// letter. A match must start where the preceding character is not a name
// character and end where the following character is not a name character.
// A trailing possessive is the one exception: "Betty's" and "James'" match
// "Betty" and "James".

#ifndef SPEAKER_SENSE_NAME_MATCHER_H_
#define SPEAKER_SENSE_NAME_MATCHER_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace speaker_sense {

class NameMatcher {
 public:
  struct Match {
    std::size_t begin;
    std::size_t end;
    std::size_t name_index;  // index into names()
  };

  NameMatcher() = default;
  explicit NameMatcher(std::span<const std::string> names);

  // Non-overlapping matches, scanning left to right and taking the longest
  // name at each word start.
  std::vector<Match> find_all(std::string_view text) const;

  bool contains(std::string_view text) const { return !find_all(text).empty(); }

  const std::vector<std::string>& names() const { return names_; }
  bool empty() const { return names_.empty(); }

 private:
  std::vector<std::string> names_;
  // Names made only of name characters, looked up by whole run.
  std::unordered_map<std::string, std::size_t> single_token_;
  // Names containing spaces or other separators, checked at every word start.
  std::vector<std::size_t> multi_token_;
};

// Replaces every matched occurrence of a key of `replacements` with its
// value in a single simultaneous pass (so swaps such as {A->B, B->A} work).
// All other bytes are copied unchanged.
std::string substitute_names(std::string_view text,
                         const std::map<std::string, std::string>& replacements);

// Same, with a prebuilt matcher whose names() are the keys of `replacements`.
std::string substitute_names(std::string_view text, const NameMatcher& matcher,
                         std::span<const std::string> replacement_by_index);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_NAME_MATCHER_H_
