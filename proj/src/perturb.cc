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

#include "speaker_sense/perturb.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "speaker_sense/errors.h"
#include "speaker_sense/name_matcher.h"

namespace speaker_sense {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Draws tried over the whole pool before falling back to an explicit
// admissible list.
constexpr int kRejectionAttempts = 64;

Gender SpeakerGender(const std::string& speaker, const NamePool& pool,
                     const MappingConstraints& c) {
  if (auto it = c.speaker_genders.find(speaker); it != c.speaker_genders.end()) {
    return it->second;
  }
  if (const NameEntry* e = pool.find(speaker)) return e->gender;
  return Gender::kUnknown;
}

std::string ChangeOneVariantId(std::size_t speaker_index, std::size_t t) {
  return "s" + std::to_string(speaker_index) + ".t" + std::to_string(t);
}

}  // namespace

std::map<std::string, std::string> NameMapping::as_map() const {
  return {pairs.begin(), pairs.end()};
}

std::optional<std::string> NameMapping::replacement_of(
    std::string_view original) const {
  for (const auto& [from, to] : pairs) {
    if (from == original) return to;
  }
  return std::nullopt;
}

bool NameMapping::is_injective() const {
  std::unordered_set<std::string> seen;
  for (const auto& [from, to] : pairs) {
    if (!seen.insert(to).second) return false;
  }
  return true;
}

NameMapping sample_mapping(std::span<const std::string> speakers,
                           const NamePool& pool,
                           const MappingConstraints& constraints,
                           std::uint64_t seed) {
  NameMapping mapping;
  mapping.seed = seed;
  mapping.pool_label = pool.label();
  Rng rng(seed);
  std::unordered_set<std::string> used;
  const auto& entries = pool.entries();

  for (const std::string& speaker : speakers) {
    const Gender speaker_gender = SpeakerGender(speaker, pool, constraints);
    auto admissible = [&](const NameEntry& e) {
      if (used.contains(e.name)) return false;
      if (e.name != speaker && constraints.forbidden.contains(e.name)) {
        return false;
      }
      if (constraints.strict_change && e.name == speaker) return false;
      if (constraints.gender_consistent && speaker_gender != Gender::kUnknown &&
          e.gender != Gender::kUnknown && e.gender != speaker_gender) {
        return false;
      }
      return true;
    };

    const NameEntry* chosen = nullptr;
    if (!entries.empty()) {
      for (int attempt = 0; attempt < kRejectionAttempts; ++attempt) {
        const NameEntry& e = entries[rng.uniform_index(entries.size())];
        if (admissible(e)) {
          chosen = &e;
          break;
        }
      }
    }
    if (chosen == nullptr) {
      std::vector<const NameEntry*> candidates;
      for (const auto& e : entries) {
        if (admissible(e)) candidates.push_back(&e);
      }
      if (candidates.empty()) {
        throw InfeasibleError(
            speaker, "no admissible name left in pool '" + pool.label() +
                         "' (" + std::to_string(entries.size()) +
                         " names, " + std::to_string(used.size()) +
                         " already used)");
      }
      chosen = candidates[rng.uniform_index(candidates.size())];
    }
    used.insert(chosen->name);
    mapping.pairs.emplace_back(speaker, chosen->name);
  }
  return mapping;
}

Sample replace_names(const Sample& sample, const NameMapping& mapping) {
  if (mapping.pairs.empty()) return sample;
  std::vector<std::string> keys;
  std::vector<std::string> values;
  for (const auto& [from, to] : mapping.pairs) {
    keys.push_back(from);
    values.push_back(to);
  }
  const NameMatcher matcher(keys);
  const auto map = mapping.as_map();

  Sample out;
  out.id = sample.id;
  out.dialogue.reserve(sample.dialogue.size());
  for (const auto& u : sample.dialogue) {
    auto it = map.find(u.speaker);
    out.dialogue.push_back(
        Utterance{it == map.end() ? u.speaker : it->second,
                  substitute_names(u.text, matcher, values)});
  }
  if (sample.context) {
    out.context = substitute_names(*sample.context, matcher, values);
  }
  out.reference = substitute_names(sample.reference, matcher, values);
  return out;
}

std::string back_substitute(std::string_view text, const NameMapping& mapping) {
  std::map<std::string, std::string> inverse;
  for (const auto& [from, to] : mapping.pairs) {
    if (from == to) continue;
    if (!inverse.emplace(to, from).second) {
      throw InvalidArgument("back_substitute: mapping is not injective ('" +
                            to + "' used twice)");
    }
  }
  if (inverse.empty()) return std::string(text);
  return substitute_names(text, inverse);
}

std::string_view mode_name(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::kChangeAll:
      return "change-all";
    case PerturbationMode::kChangeOne:
      return "change-one";
    case PerturbationMode::kAugment:
      return "augment";
    case PerturbationMode::kIdCodes:
      return "id";
  }
  return "change-all";
}

PerturbationMode parse_mode(std::string_view name) {
  if (name == "change-all") return PerturbationMode::kChangeAll;
  if (name == "change-one") return PerturbationMode::kChangeOne;
  if (name == "augment") return PerturbationMode::kAugment;
  if (name == "id" || name == "id-codes") return PerturbationMode::kIdCodes;
  throw InvalidArgument("unknown perturbation mode '" + std::string(name) +
                        "' (expected change-all, change-one, augment or id)");
}

MappingConstraints mention_constraints(const Sample& sample,
                                       std::span<const std::string> domain,
                                       const NamePool& pool,
                                       const PerturbOptions& options) {
  MappingConstraints c;
  c.gender_consistent = options.gender_consistent;
  c.strict_change = options.strict_change;

  const auto speakers = extract_speakers(sample.dialogue);
  c.forbidden = detect_mentions(sample, pool.matcher());
  for (const auto& name : detect_mentions(sample, speakers)) {
    c.forbidden.insert(name);
  }
  // The reference is renamed too, so its names are off limits as well.
  for (const auto& m : pool.matcher().find_all(sample.reference)) {
    c.forbidden.insert(pool.matcher().names()[m.name_index]);
  }
  const std::set<std::string> in_domain(domain.begin(), domain.end());
  for (const auto& s : speakers) {
    if (!in_domain.contains(s)) c.forbidden.insert(s);
  }
  return c;
}

PerturbationSet make_test_variants(const Sample& sample, const NamePool& pool,
                                   std::size_t count, std::uint64_t seed,
                                   PerturbationMode mode,
                                   const PerturbOptions& options) {
  PerturbationSet set;
  set.sample_id = sample.id;
  set.mode = mode;
  if (mode == PerturbationMode::kIdCodes) {
    NameMapping mapping = id_code_mapping(sample);
    set.variants.push_back(Variant{"id", mapping, replace_names(sample, mapping)});
    return set;
  }
  if (mode != PerturbationMode::kChangeAll) {
    throw InvalidArgument(
        "make_test_variants supports change-all and id modes only");
  }
  if (count == 0) throw InvalidArgument("T must be >= 1");

  const auto speakers = extract_speakers(sample.dialogue);
  const auto constraints = mention_constraints(sample, speakers, pool, options);
  for (std::size_t t = 0; t < count; ++t) {
    const std::uint64_t s = derive_seed(seed, sample.id, t, kStreamChangeAll);
    NameMapping mapping = sample_mapping(speakers, pool, constraints, s);
    Sample variant = replace_names(sample, mapping);
    set.variants.push_back(
        Variant{"t" + std::to_string(t), std::move(mapping), std::move(variant)});
  }
  return set;
}

std::vector<PerturbationSet> make_single_speaker_variants(
    const Sample& sample, const NamePool& pool, std::size_t count,
    std::uint64_t seed, const PerturbOptions& options) {
  if (count == 0) throw InvalidArgument("T must be >= 1");
  const auto speakers = extract_speakers(sample.dialogue);
  std::vector<PerturbationSet> sets;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    const std::vector<std::string> domain = {speakers[i]};
    const auto constraints = mention_constraints(sample, domain, pool, options);
    PerturbationSet set;
    set.sample_id = sample.id;
    set.mode = PerturbationMode::kChangeOne;
    set.target_speaker = speakers[i];
    for (std::size_t t = 0; t < count; ++t) {
      const std::uint64_t s =
          derive_seed(seed, sample.id, t, kStreamChangeOneBase + i);
      NameMapping mapping = sample_mapping(domain, pool, constraints, s);
      Sample variant = replace_names(sample, mapping);
      set.variants.push_back(Variant{ChangeOneVariantId(i, t),
                                     std::move(mapping), std::move(variant)});
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

NameMapping id_code_mapping(const Sample& sample) {
  NameMapping mapping;
  mapping.pool_label = "id-codes";
  const auto speakers = extract_speakers(sample.dialogue);
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    mapping.pairs.emplace_back(speakers[i], "Speaker" + std::to_string(i + 1));
  }
  return mapping;
}

Sample apply_id_codes(const Sample& sample) {
  return replace_names(sample, id_code_mapping(sample));
}

PerturbationSet make_augmented_set(const Sample& sample, const NamePool& pool,
                                   std::size_t k, std::uint64_t seed,
                                   const PerturbOptions& options) {
  if (k == 0) throw InvalidArgument("K must be >= 1");
  PerturbationSet set;
  set.sample_id = sample.id;
  set.mode = PerturbationMode::kAugment;
  const auto speakers = extract_speakers(sample.dialogue);
  const auto constraints = mention_constraints(sample, speakers, pool, options);
  for (std::size_t j = 1; j < k; ++j) {
    const std::uint64_t s = derive_seed(seed, sample.id, j, kStreamAugment);
    NameMapping mapping = sample_mapping(speakers, pool, constraints, s);
    Sample variant = replace_names(sample, mapping);
    variant.id = sample.id + "#aug" + std::to_string(j);
    set.variants.push_back(Variant{"aug" + std::to_string(j),
                                   std::move(mapping), std::move(variant)});
  }
  return set;
}

std::vector<Sample> augment_training(const Sample& sample, const NamePool& pool,
                                     std::size_t k, std::uint64_t seed,
                                     const PerturbOptions& options) {
  std::vector<Sample> out;
  for (auto& v : make_augmented_set(sample, pool, k, seed, options).variants) {
    out.push_back(std::move(v.sample));
  }
  return out;
}

NamePool speaker_pool(const Corpus& corpus, std::string label) {
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  for (const auto& s : corpus.samples) {
    for (const auto& u : s.dialogue) {
      if (seen.insert(u.speaker).second) names.push_back(u.speaker);
    }
  }
  return NamePool::from_names(names, std::move(label));
}

std::string serialize_variant(const PerturbationSet& set, const Variant& v) {
  ordered_json line;
  line["sample_id"] = set.sample_id;
  line["variant_id"] = v.variant_id;
  line["mode"] = std::string(mode_name(set.mode));
  ordered_json pairs = ordered_json::array();
  for (const auto& [from, to] : v.mapping.pairs) {
    pairs.push_back(ordered_json::array({from, to}));
  }
  ordered_json mapping;
  mapping["pairs"] = std::move(pairs);
  mapping["seed"] = v.mapping.seed;
  mapping["pool"] = v.mapping.pool_label;
  line["mapping"] = std::move(mapping);
  line["sample"] = ordered_json::parse(serialize_sample(v.sample));
  return line.dump();
}

std::string serialize_perturbation_sets(std::span<const PerturbationSet> sets) {
  std::string out;
  for (const auto& set : sets) {
    for (const auto& v : set.variants) {
      out += serialize_variant(set, v);
      out += '\n';
    }
  }
  return out;
}

void write_perturbation_sets(std::span<const PerturbationSet> sets,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << serialize_perturbation_sets(sets);
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<PerturbationSet> parse_perturbation_sets(std::string_view text,
                                                     const std::string& source) {
  std::vector<PerturbationSet> sets;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view raw = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json line;
    try {
      line = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, "", std::string("invalid JSON: ") + e.what());
    }
    auto str = [&](const char* key) {
      auto it = line.find(key);
      if (it == line.end() || !it->is_string()) {
        throw ParseError(source, line_no, key, "missing or not a string");
      }
      return it->get<std::string>();
    };
    Variant v;
    const std::string sample_id = str("sample_id");
    v.variant_id = str("variant_id");
    PerturbationMode mode;
    try {
      mode = parse_mode(str("mode"));
    } catch (const InvalidArgument& e) {
      throw ParseError(source, line_no, "mode", e.what());
    }

    auto m = line.find("mapping");
    if (m == line.end() || !m->is_object()) {
      throw ParseError(source, line_no, "mapping", "missing or not an object");
    }
    try {
      for (const auto& pair : m->at("pairs")) {
        v.mapping.pairs.emplace_back(pair.at(0).get<std::string>(),
                                     pair.at(1).get<std::string>());
      }
      v.mapping.seed = m->at("seed").get<std::uint64_t>();
      v.mapping.pool_label = m->at("pool").get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, "mapping", e.what());
    }

    auto s = line.find("sample");
    if (s == line.end() || !s->is_object()) {
      throw ParseError(source, line_no, "sample", "missing or not an object");
    }
    v.sample = parse_sample(s->dump(), source, line_no);

    std::optional<std::string> target;
    if (mode == PerturbationMode::kChangeOne) {
      if (v.mapping.pairs.size() != 1) {
        throw ParseError(source, line_no, "mapping",
                         "change-one variant must rename exactly one speaker");
      }
      target = v.mapping.pairs.front().first;
    }

    const bool same_set = !sets.empty() && sets.back().sample_id == sample_id &&
                          sets.back().mode == mode &&
                          sets.back().target_speaker == target;
    if (!same_set) {
      PerturbationSet set;
      set.sample_id = sample_id;
      set.mode = mode;
      set.target_speaker = target;
      sets.push_back(std::move(set));
    }
    sets.back().variants.push_back(std::move(v));
  }
  return sets;
}

std::vector<PerturbationSet> read_perturbation_sets(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "", "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_perturbation_sets(buf.str(), path);
}

}  // namespace speaker_sense
