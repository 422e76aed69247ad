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

// Speaker-name substitution: mapping sampling, replacement, and the
// change-all / change-one / augmentation / ID-code variant generators.
//
// Randomness is fully determined by (global seed, sample id, variant index,
// stream); see random.h.

#ifndef SPEAKER_SENSE_PERTURB_H_
#define SPEAKER_SENSE_PERTURB_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "speaker_sense/corpus.h"
#include "speaker_sense/namepool.h"
#include "speaker_sense/random.h"

namespace speaker_sense {

struct NameMapping {
  // Original -> replacement, in speaker first-occurrence order.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::uint64_t seed = 0;
  std::string pool_label;

  std::map<std::string, std::string> as_map() const;
  std::optional<std::string> replacement_of(std::string_view original) const;
  bool is_injective() const;

  bool operator==(const NameMapping&) const = default;
};

struct MappingConstraints {
  // Require replacement gender == original gender when both are known.
  bool gender_consistent = false;
  // Require replacement != original.
  bool strict_change = false;
  // Names a replacement may never take, except a speaker keeping its own
  // name. Typically in-text mentions plus speakers outside the domain.
  std::set<std::string> forbidden;
  // Gender of the original speakers. Speakers not listed are looked up in
  // the pool; unknown otherwise.
  std::map<std::string, Gender> speaker_genders;
};

// Draws an injective mapping for `speakers` (in order) uniformly over each
// speaker's admissible pool names. Throws InfeasibleError naming the first
// speaker left without an admissible name.
NameMapping sample_mapping(std::span<const std::string> speakers,
                           const NamePool& pool,
                           const MappingConstraints& constraints,
                           std::uint64_t seed);

// Renames speaker fields in the mapping's domain and replaces word-boundary
// occurrences of those names in utterance texts, context, and reference.
// The sample id is kept.
Sample replace_names(const Sample& sample, const NameMapping& mapping);

// Maps every replacement name in `text` back to its original.
std::string back_substitute(std::string_view text, const NameMapping& mapping);

enum class PerturbationMode { kChangeAll, kChangeOne, kAugment, kIdCodes };
std::string_view mode_name(PerturbationMode mode);
PerturbationMode parse_mode(std::string_view name);

struct Variant {
  std::string variant_id;
  NameMapping mapping;
  Sample sample;
};

struct PerturbationSet {
  std::string sample_id;
  PerturbationMode mode = PerturbationMode::kChangeAll;
  // Set for kChangeOne.
  std::optional<std::string> target_speaker;
  std::vector<Variant> variants;
};

struct PerturbOptions {
  bool gender_consistent = false;
  bool strict_change = false;
};

// Seed streams. Change-one for speaker i uses stream kStreamChangeOneBase + i,
// so a single-speaker dialogue gets exactly its change-all mappings.
inline constexpr std::uint64_t kStreamChangeAll = 0;
inline constexpr std::uint64_t kStreamChangeOneBase = 0;
inline constexpr std::uint64_t kStreamAugment = 0x6175676D656E74ULL;  // "augment"

// The constraints used for `sample` when renaming `domain`: mentions of pool
// names or speakers inside the dialogue/context, pool names in the reference,
// and every speaker outside the domain are forbidden.
MappingConstraints mention_constraints(const Sample& sample,
                                       std::span<const std::string> domain,
                                       const NamePool& pool,
                                       const PerturbOptions& options);

// T change-all variants (mode kChangeAll) or the single ID-coded variant
// (mode kIdCodes; `pool`, `count` and `seed` are ignored).
PerturbationSet make_test_variants(const Sample& sample, const NamePool& pool,
                                   std::size_t count, std::uint64_t seed,
                                   PerturbationMode mode = PerturbationMode::kChangeAll,
                                   const PerturbOptions& options = {});

// One set per speaker, each with T variants renaming only that speaker.
std::vector<PerturbationSet> make_single_speaker_variants(
    const Sample& sample, const NamePool& pool, std::size_t count,
    std::uint64_t seed, const PerturbOptions& options = {});

// Speaker i (1-based, by first turn) becomes "Speaker{i}".
NameMapping id_code_mapping(const Sample& sample);
Sample apply_id_codes(const Sample& sample);

// K-1 renamed copies of a training sample, reference included. Ids are
// "<id>#aug<k>" for k = 1..K-1.
PerturbationSet make_augmented_set(const Sample& sample, const NamePool& pool,
                                   std::size_t k, std::uint64_t seed,
                                   const PerturbOptions& options = {});
std::vector<Sample> augment_training(const Sample& sample, const NamePool& pool,
                                     std::size_t k, std::uint64_t seed,
                                     const PerturbOptions& options = {});

// Distinct speaker names across a corpus, in first-seen order; the
// in-distribution pool.
NamePool speaker_pool(const Corpus& corpus, std::string label = "in-distribution");

// JSON Lines, one variant per line:
//   {"sample_id", "variant_id", "mode",
//    "mapping": {"pairs": [[orig, repl], ...], "seed", "pool"},
//    "sample": <canonical sample>}
std::string serialize_variant(const PerturbationSet& set, const Variant& v);
std::string serialize_perturbation_sets(std::span<const PerturbationSet> sets);
void write_perturbation_sets(std::span<const PerturbationSet> sets,
                             const std::string& path);
// Consecutive lines with the same sample id, mode and (for change-one)
// target speaker form one set.
std::vector<PerturbationSet> parse_perturbation_sets(std::string_view text,
                                                     const std::string& source);
std::vector<PerturbationSet> read_perturbation_sets(const std::string& path);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_PERTURB_H_
