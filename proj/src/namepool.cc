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

#include "speaker_sense/namepool.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "csv.h"
#include "speaker_sense/errors.h"
#include "speaker_sense/name_matcher.h"

namespace speaker_sense {
namespace {

constexpr std::array<const char*, 4> kRaceColumns = {"p_white", "p_hispanic",
                                                     "p_black", "p_asian"};

bool HasEdgeWhitespace(std::string_view s) {
  auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  return !s.empty() && (ws(s.front()) || ws(s.back()));
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::optional<std::uint64_t> ParseCount(const std::string& text,
                                        const std::string& source,
                                        std::size_t line,
                                        const std::string& column) {
  const std::string t = Trim(text);
  if (t.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(source, line, column,
                     "expected a non-negative integer, got '" + t + "'");
  }
  return value;
}

std::optional<double> ParseProbability(const std::string& text,
                                       const std::string& source,
                                       std::size_t line,
                                       const std::string& column) {
  const std::string t = Trim(text);
  if (t.empty()) return std::nullopt;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || !(value >= 0.0)) {
    throw ParseError(source, line, column,
                     "expected a non-negative number, got '" + t + "'");
  }
  return value;
}

std::optional<Race> ParseRace(std::string_view text) {
  const std::string t = ToLower(Trim(text));
  if (t.empty()) return std::nullopt;
  for (Race r : kAllRaces) {
    if (t == ToLower(race_name(r))) return r;
  }
  return std::nullopt;
}

const std::optional<std::uint64_t>& CountOf(const NameEntry& e, CountKey key) {
  return key == CountKey::kExact ? e.f_exact : e.f_ner;
}

}  // namespace

std::string_view gender_name(Gender g) {
  switch (g) {
    case Gender::kFemale:
      return "female";
    case Gender::kMale:
      return "male";
    case Gender::kUnknown:
      break;
  }
  return "unknown";
}

Gender parse_gender(std::string_view text) {
  const std::string t = ToLower(Trim(text));
  if (t == "f" || t == "female" || t == "woman" || t == "girl") {
    return Gender::kFemale;
  }
  if (t == "m" || t == "male" || t == "man" || t == "boy") return Gender::kMale;
  return Gender::kUnknown;
}

std::string_view race_name(Race r) {
  switch (r) {
    case Race::kWhite:
      return "White";
    case Race::kHispanic:
      return "Hispanic";
    case Race::kBlack:
      return "Black";
    case Race::kAsian:
      return "Asian";
  }
  return "White";
}

std::string_view popularity_group_name(PopularityGroup g) {
  switch (g) {
    case PopularityGroup::kFrequent:
      return "Frequent";
    case PopularityGroup::kPolysemous:
      return "Polysemous";
    case PopularityGroup::kRare:
      return "Rare";
    case PopularityGroup::kUnknown:
      return "Unknown";
  }
  return "Unknown";
}

NamePool::NamePool(std::vector<NameEntry> entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& name = entries_[i].name;
    if (name.empty()) throw InvalidArgument("pool '" + label_ + "': empty name");
    if (HasEdgeWhitespace(name)) {
      throw InvalidArgument("pool '" + label_ + "': name '" + name +
                            "' has leading or trailing whitespace");
    }
    if (!index_.emplace(name, i).second) {
      throw InvalidArgument("pool '" + label_ + "': duplicate name '" + name +
                            "'");
    }
  }
  matcher_ = std::make_shared<const NameMatcher>(names());
}

NamePool NamePool::from_names(std::span<const std::string> names,
                              std::string label) {
  std::vector<NameEntry> entries;
  entries.reserve(names.size());
  for (const auto& n : names) entries.push_back(NameEntry{.name = n});
  return NamePool(std::move(entries), std::move(label));
}

std::vector<std::string> NamePool::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

const NameEntry* NamePool::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const NameMatcher& NamePool::matcher() const {
  static const NameMatcher kEmpty;
  return matcher_ ? *matcher_ : kEmpty;
}

NamePool parse_pool_text(std::string_view text, const PoolSchema& schema,
                         const std::string& source) {
  char delimiter = schema.delimiter;
  if (delimiter == 0) {
    const auto header_end = text.find('\n');
    const auto header = text.substr(0, header_end);
    delimiter = (source.ends_with(".tsv") ||
                 header.find('\t') != std::string_view::npos)
                    ? '\t'
                    : ',';
  }
  const auto rows = internal::ParseCsv(text, delimiter, source);
  if (rows.empty()) throw ParseError(source, 0, "", "empty pool file");

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    col[ToLower(Trim(rows[0].fields[i]))] = i;
  }
  if (!col.contains("name")) {
    throw ParseError(source, rows[0].line, "name", "missing required column");
  }
  auto field = [&](const internal::CsvRow& row,
                   const char* name) -> std::optional<std::string> {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.fields.size()) return std::nullopt;
    return row.fields[it->second];
  };

  std::vector<NameEntry> entries;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    NameEntry e;
    e.name = Trim(field(row, "name").value_or(""));
    if (e.name.empty()) {
      throw ParseError(source, row.line, "name", "empty name");
    }
    if (schema.single_token_only &&
        e.name.find_first_of(" \t") != std::string::npos) {
      continue;
    }
    if (!seen.insert(e.name).second) {
      throw ParseError(source, row.line, "name",
                       "duplicate name '" + e.name + "'");
    }
    if (auto g = field(row, "gender")) e.gender = parse_gender(*g);
    if (auto v = field(row, "f_exact")) {
      e.f_exact = ParseCount(*v, source, row.line, "f_exact");
    }
    if (auto v = field(row, "f_ner")) {
      e.f_ner = ParseCount(*v, source, row.line, "f_ner");
    }
    std::array<double, 4> probs{};
    bool any_prob = false;
    for (std::size_t k = 0; k < kRaceColumns.size(); ++k) {
      if (auto v = field(row, kRaceColumns[k])) {
        if (auto p = ParseProbability(*v, source, row.line, kRaceColumns[k])) {
          probs[k] = *p;
          any_prob = true;
        }
      }
    }
    if (any_prob) e.race_probabilities = probs;
    if (auto v = field(row, "race")) {
      e.race = ParseRace(*v);
      if (!e.race && !Trim(*v).empty()) {
        throw ParseError(source, row.line, "race",
                         "unknown race tag '" + Trim(*v) + "'");
      }
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw ParseError(source, 0, "", "pool has no names");
  if (entries.size() < 2) {
    throw ParseError(source, 0, "",
                     "pool needs at least two names to allow any change");
  }
  std::string label = schema.label;
  if (label.empty()) label = std::filesystem::path(source).stem().string();
  return NamePool(std::move(entries), std::move(label));
}

NamePool load_pool(const std::string& path, const PoolSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "", "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pool_text(buf.str(), schema, path);
}

std::map<std::string, std::size_t> rank_names(std::span<const NameEntry> entries,
                                              CountKey key) {
  std::vector<const NameEntry*> order;
  order.reserve(entries.size());
  for (const auto& e : entries) {
    if (!CountOf(e, key)) {
      throw InvalidArgument(std::string("name '") + e.name + "' has no " +
                            (key == CountKey::kExact ? "f_exact" : "f_ner") +
                            " count");
    }
    order.push_back(&e);
  }
  std::sort(order.begin(), order.end(),
            [key](const NameEntry* a, const NameEntry* b) {
              const auto ca = *CountOf(*a, key);
              const auto cb = *CountOf(*b, key);
              if (ca != cb) return ca > cb;
              return a->name < b->name;
            });
  std::map<std::string, std::size_t> ranks;
  for (std::size_t i = 0; i < order.size(); ++i) {
    ranks[order[i]->name] = i + 1;
  }
  return ranks;
}

double uniqueness_score(std::size_t rank_exact, std::size_t rank_ner) {
  if (rank_exact < 1 || rank_ner < 1) {
    throw InvalidArgument("ranks must be >= 1");
  }
  const double a = static_cast<double>(rank_exact);
  const double b = static_cast<double>(rank_ner);
  return (a - b) / (a + b);
}

PopularityGroups build_popularity_groups(
    const NamePool& pool, std::size_t group_size,
    std::span<const std::string> frequent_names) {
  if (group_size == 0) throw InvalidArgument("group size must be positive");
  if (group_size > pool.size() / 4) {
    throw InvalidArgument("group size " + std::to_string(group_size) +
                          " exceeds pool size / 4 (" +
                          std::to_string(pool.size() / 4) + ")");
  }

  PopularityGroups out;
  out.rank_exact = rank_names(pool.entries(), CountKey::kExact);
  out.rank_ner = rank_names(pool.entries(), CountKey::kNer);
  for (const auto& e : pool.entries()) {
    out.uniqueness[e.name] =
        uniqueness_score(out.rank_exact.at(e.name), out.rank_ner.at(e.name));
  }

  const std::set<std::string> frequent(frequent_names.begin(),
                                       frequent_names.end());
  for (const auto& n : frequent) {
    out.assignment[n] = PopularityGroup::kFrequent;
  }

  std::vector<const NameEntry*> zero;
  std::vector<const NameEntry*> nonzero;
  for (const auto& e : pool.entries()) {
    if (frequent.contains(e.name)) continue;
    (*e.f_exact == 0 ? zero : nonzero).push_back(&e);
  }

  std::sort(zero.begin(), zero.end(),
            [](const NameEntry* a, const NameEntry* b) { return a->name < b->name; });
  if (zero.size() < group_size) {
    throw InvalidArgument("Unknown group needs " + std::to_string(group_size) +
                          " names with f_exact == 0 but the pool has only " +
                          std::to_string(zero.size()) + " (short by " +
                          std::to_string(group_size - zero.size()) + ")");
  }
  for (std::size_t i = 0; i < group_size; ++i) {
    out.assignment[zero[i]->name] = PopularityGroup::kUnknown;
  }

  std::sort(nonzero.begin(), nonzero.end(),
            [](const NameEntry* a, const NameEntry* b) {
              if (*a->f_exact != *b->f_exact) return *a->f_exact < *b->f_exact;
              return a->name < b->name;
            });
  if (nonzero.size() < group_size) {
    throw InvalidArgument("Rare group needs " + std::to_string(group_size) +
                          " names with f_exact > 0 but the pool has only " +
                          std::to_string(nonzero.size()) + " (short by " +
                          std::to_string(group_size - nonzero.size()) + ")");
  }
  for (std::size_t i = 0; i < group_size; ++i) {
    out.assignment[nonzero[i]->name] = PopularityGroup::kRare;
  }

  std::vector<const NameEntry*> rest;
  for (const auto& e : pool.entries()) {
    if (!out.assignment.contains(e.name)) rest.push_back(&e);
  }
  std::sort(rest.begin(), rest.end(),
            [&](const NameEntry* a, const NameEntry* b) {
              const double ua = out.uniqueness.at(a->name);
              const double ub = out.uniqueness.at(b->name);
              if (ua != ub) return ua < ub;
              return a->name < b->name;
            });
  if (rest.size() < group_size) {
    throw InvalidArgument("Polysemous group needs " +
                          std::to_string(group_size) +
                          " remaining names but only " +
                          std::to_string(rest.size()) + " are left (short by " +
                          std::to_string(group_size - rest.size()) + ")");
  }
  for (std::size_t i = 0; i < group_size; ++i) {
    out.assignment[rest[i]->name] = PopularityGroup::kPolysemous;
  }
  return out;
}

std::map<Race, std::vector<std::string>> build_race_groups(const NamePool& pool,
                                                           std::size_t top_k) {
  std::map<Race, std::vector<const NameEntry*>> buckets;
  for (Race r : kAllRaces) buckets[r];
  for (const auto& e : pool.entries()) {
    if (!e.race_probabilities) continue;
    const auto& p = *e.race_probabilities;
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      if (p[k] > p[best]) best = k;
    }
    buckets[static_cast<Race>(best)].push_back(&e);
  }
  std::map<Race, std::vector<std::string>> out;
  for (auto& [race, names] : buckets) {
    std::sort(names.begin(), names.end(),
              [](const NameEntry* a, const NameEntry* b) {
                const auto ca = a->f_exact.value_or(0);
                const auto cb = b->f_exact.value_or(0);
                if (ca != cb) return ca > cb;
                return a->name < b->name;
              });
    auto& list = out[race];
    for (std::size_t i = 0; i < names.size() && i < top_k; ++i) {
      list.push_back(names[i]->name);
    }
  }
  return out;
}

std::map<std::string, std::uint64_t> count_exact_occurrences(
    std::span<const std::string> names, std::span<const std::string> texts) {
  const NameMatcher matcher(names);
  std::map<std::string, std::uint64_t> counts;
  for (const auto& n : matcher.names()) counts[n] = 0;
  for (const auto& t : texts) {
    for (const auto& m : matcher.find_all(t)) {
      ++counts[matcher.names()[m.name_index]];
    }
  }
  return counts;
}

}  // namespace speaker_sense
