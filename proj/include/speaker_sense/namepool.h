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

// Candidate-name inventories and the popularity / race group construction.
//
// Pool files are CSV or TSV with a header row. Only `name` is required;
// recognised optional columns are gender, f_exact, f_ner, race, and the four
// race probability columns p_white, p_hispanic, p_black, p_asian.

#ifndef SPEAKER_SENSE_NAMEPOOL_H_
#define SPEAKER_SENSE_NAMEPOOL_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speaker_sense/name_matcher.h"

namespace speaker_sense {

enum class Gender { kUnknown, kFemale, kMale };

// Fixed order; also the tie-break order for argmax assignment.
enum class Race { kWhite = 0, kHispanic = 1, kBlack = 2, kAsian = 3 };
inline constexpr std::array<Race, 4> kAllRaces = {Race::kWhite, Race::kHispanic,
                                                  Race::kBlack, Race::kAsian};

std::string_view gender_name(Gender g);
Gender parse_gender(std::string_view text);  // lenient: f/female/m/male
std::string_view race_name(Race r);

struct NameEntry {
  std::string name;
  Gender gender = Gender::kUnknown;
  std::optional<std::uint64_t> f_exact;
  std::optional<std::uint64_t> f_ner;
  std::optional<Race> race;
  // Indexed by Race.
  std::optional<std::array<double, 4>> race_probabilities;
};

class NamePool {
 public:
  NamePool() = default;
  // Throws InvalidArgument on empty or duplicate names, or on names with
  // leading/trailing whitespace.
  NamePool(std::vector<NameEntry> entries, std::string label);

  // Convenience: entries with unknown gender and no counts.
  static NamePool from_names(std::span<const std::string> names,
                            std::string label);

  const std::vector<NameEntry>& entries() const { return entries_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<std::string> names() const;
  const NameEntry* find(std::string_view name) const;
  // Word-boundary matcher over all pool names.
  const NameMatcher& matcher() const;

 private:
  std::vector<NameEntry> entries_;
  std::string label_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::shared_ptr<const NameMatcher> matcher_;
};

struct PoolSchema {
  // 0 means: tab for *.tsv files or tab-containing headers, comma otherwise.
  char delimiter = 0;
  std::string label;  // defaults to the file stem
  // Drop names that contain whitespace (multi-word names).
  bool single_token_only = true;
};

// Throws ParseError on an empty file, missing `name` column, malformed
// numbers, or duplicate names. A loaded pool always has at least two
// entries.
NamePool load_pool(const std::string& path, const PoolSchema& schema = {});
NamePool parse_pool_text(std::string_view text, const PoolSchema& schema,
                         const std::string& source);

enum class CountKey { kExact, kNer };

// Ordinal ranks 1..N, descending by the chosen count, ties broken by name
// ascending. Throws InvalidArgument if any entry lacks the count.
std::map<std::string, std::size_t> rank_names(std::span<const NameEntry> entries,
                                              CountKey key);

// (rank_exact - rank_ner) / (rank_exact + rank_ner). Lower means the string
// is used more often as an ordinary word than as a name.
double uniqueness_score(std::size_t rank_exact, std::size_t rank_ner);

enum class PopularityGroup { kFrequent, kPolysemous, kRare, kUnknown };
std::string_view popularity_group_name(PopularityGroup g);

struct PopularityGroups {
  std::map<std::string, PopularityGroup> assignment;
  // Per pool entry; present when both counts are available.
  std::map<std::string, double> uniqueness;
  std::map<std::string, std::size_t> rank_exact;
  std::map<std::string, std::size_t> rank_ner;
};

// Unknown: the first `group_size` names (by name) with f_exact == 0.
// Rare: the `group_size` names with the smallest non-zero f_exact.
// Polysemous: the `group_size` names with the lowest uniqueness score among
// the rest.
// Frequent: every name of `frequent_names`; those names are never placed in
// another group.
// Requires group_size <= pool.size() / 4 and both counts on every entry.
PopularityGroups build_popularity_groups(
    const NamePool& pool, std::size_t group_size,
    std::span<const std::string> frequent_names);

// Each entry with race probabilities goes to its argmax race; each race
// keeps its `top_k` names with the highest f_exact (ties by name).
std::map<Race, std::vector<std::string>> build_race_groups(const NamePool& pool,
                                                           std::size_t top_k);

// Word-boundary occurrence counts of each name over `texts`.
std::map<std::string, std::uint64_t> count_exact_occurrences(
    std::span<const std::string> names, std::span<const std::string> texts);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_NAMEPOOL_H_
