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

#include <gtest/gtest.h>

#include <algorithm>

#include "speaker_sense/errors.h"
#include "test_util.h"

namespace speaker_sense {
namespace {

using testing::RepoData;
using testing::TempDir;
using testing::WriteFile;

NameEntry Counted(std::string name, std::uint64_t f_exact, std::uint64_t f_ner) {
  NameEntry e;
  e.name = std::move(name);
  e.f_exact = f_exact;
  e.f_ner = f_ner;
  return e;
}

TEST(NamePool, FrequentListHasHundredPerGender) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  ASSERT_EQ(pool.size(), 200u);
  EXPECT_EQ(pool.label(), "frequent_names");
  std::size_t male = 0, female = 0;
  for (const auto& e : pool.entries()) {
    (e.gender == Gender::kMale ? male : female)++;
  }
  EXPECT_EQ(male, 100u);
  EXPECT_EQ(female, 100u);
  ASSERT_NE(pool.find("Alexis"), nullptr);
  EXPECT_EQ(pool.find("Alexis")->gender, Gender::kFemale);
}

TEST(NamePool, NameOnlyFile) {
  TempDir dir;
  WriteFile(dir.file("p.csv"), "name\nA\nB\nC\nD\nE\n");
  const NamePool pool = load_pool(dir.file("p.csv"));
  EXPECT_EQ(pool.size(), 5u);
  for (const auto& e : pool.entries()) {
    EXPECT_EQ(e.gender, Gender::kUnknown);
    EXPECT_FALSE(e.f_exact.has_value());
  }
}

TEST(NamePool, LoadErrors) {
  TempDir dir;
  WriteFile(dir.file("dup.csv"), "name,gender\nAlexis,female\nAlexis,male\n");
  EXPECT_THROW(load_pool(dir.file("dup.csv")), ParseError);
  WriteFile(dir.file("empty.csv"), "");
  EXPECT_THROW(load_pool(dir.file("empty.csv")), ParseError);
  WriteFile(dir.file("nocol.csv"), "first\nA\nB\n");
  EXPECT_THROW(load_pool(dir.file("nocol.csv")), ParseError);
  WriteFile(dir.file("one.csv"), "name\nA\n");
  EXPECT_THROW(load_pool(dir.file("one.csv")), ParseError);
  WriteFile(dir.file("bad.csv"), "name,f_exact\nA,12x\nB,1\n");
  EXPECT_THROW(load_pool(dir.file("bad.csv")), ParseError);
}

TEST(NamePool, TsvAndMultiWordFiltering) {
  TempDir dir;
  WriteFile(dir.file("p.tsv"), "name\tgender\nMary Ann\tf\nTom\tm\nJoan\tf\n");
  const NamePool pool = load_pool(dir.file("p.tsv"));
  EXPECT_EQ(pool.names(), (std::vector<std::string>{"Tom", "Joan"}));
}

TEST(RankNames, TieBreakByName) {
  const std::vector<NameEntry> entries = {Counted("B", 10, 0), Counted("C", 5, 0),
                                          Counted("A", 10, 0)};
  const auto ranks = rank_names(entries, CountKey::kExact);
  EXPECT_EQ(ranks, (std::map<std::string, std::size_t>{{"A", 1}, {"B", 2}, {"C", 3}}));
  EXPECT_EQ(rank_names(std::vector<NameEntry>{Counted("X", 3, 3)}, CountKey::kNer)
                .at("X"),
            1u);
  const std::vector<NameEntry> equal = {Counted("c", 1, 1), Counted("a", 1, 1),
                                        Counted("b", 1, 1)};
  EXPECT_EQ(rank_names(equal, CountKey::kNer),
            (std::map<std::string, std::size_t>{{"a", 1}, {"b", 2}, {"c", 3}}));
  NameEntry missing;
  missing.name = "Q";
  EXPECT_THROW(rank_names(std::vector<NameEntry>{missing}, CountKey::kExact),
               InvalidArgument);
}

TEST(Uniqueness, Values) {
  EXPECT_DOUBLE_EQ(uniqueness_score(7, 7), 0.0);
  EXPECT_DOUBLE_EQ(uniqueness_score(100, 300), -0.5);
  EXPECT_DOUBLE_EQ(uniqueness_score(300, 100), 0.5);
  EXPECT_THROW(uniqueness_score(0, 3), InvalidArgument);
}

TEST(PopularityGroups, TwelveNameHandComputed) {
  // Ranks by f_exact: A1 B2 C3 D4 E5 F6 G7 H8 I9 J10 K11 L12.
  // Ranks by f_ner:   D1 B2 E3 F4 C5 A6 G7 H8 I9 J10 K11 L12.
  // Unknown = I J K (first zero-count names); Rare = H F G; among
  // A B C D E L the lowest u are A (-5/7), C (-1/4), then B and L tie at 0.
  const NamePool pool(
      {Counted("A", 1000, 1), Counted("B", 900, 500), Counted("C", 800, 2),
       Counted("D", 700, 600), Counted("E", 5, 5), Counted("F", 3, 3),
       Counted("G", 3, 1), Counted("H", 1, 0), Counted("I", 0, 0),
       Counted("J", 0, 0), Counted("K", 0, 0), Counted("L", 0, 0)},
      "twelve");
  const auto groups = build_popularity_groups(pool, 3, {});
  std::map<std::string, PopularityGroup> expected = {
      {"I", PopularityGroup::kUnknown},    {"J", PopularityGroup::kUnknown},
      {"K", PopularityGroup::kUnknown},    {"H", PopularityGroup::kRare},
      {"F", PopularityGroup::kRare},       {"G", PopularityGroup::kRare},
      {"A", PopularityGroup::kPolysemous}, {"C", PopularityGroup::kPolysemous},
      {"B", PopularityGroup::kPolysemous}};
  EXPECT_EQ(groups.assignment, expected);
  EXPECT_DOUBLE_EQ(groups.uniqueness.at("A"), -5.0 / 7.0);
  EXPECT_DOUBLE_EQ(groups.uniqueness.at("D"), 0.6);
}

TEST(PopularityGroups, ExampleTable) {
  const NamePool pool = load_pool(RepoData("example_group_names.csv"));
  const NamePool frequent = load_pool(RepoData("frequent_names.csv"));
  const auto groups = build_popularity_groups(pool, 10, frequent.names());
  const std::map<PopularityGroup, std::vector<std::string>> lists = {
      {PopularityGroup::kFrequent,
       {"Alexis", "Philip", "Matthew", "Frank", "Tyler", "Roy", "Catherine",
        "Joan", "Amanda", "Henry"}},
      {PopularityGroup::kPolysemous,
       {"July", "Sea", "March", "Paris", "Treasure", "Oxford", "Romania",
        "Ice", "Jersey", "Navy"}},
      {PopularityGroup::kRare,
       {"Makinzy", "Diyanna", "Javione", "Zamire", "Harkeem", "Jerralyn",
        "Crissi", "Monque", "Ajahar", "Dijion"}},
      {PopularityGroup::kUnknown,
       {"Jaliyiah", "Cardelia", "Ravindr", "Josephanthony", "Tyjohn", "Tnaya",
        "Jyren", "Kashaunda", "Jaykob", "Latonnia"}}};
  for (const auto& [group, names] : lists) {
    for (const auto& name : names) {
      ASSERT_TRUE(groups.assignment.contains(name)) << name;
      EXPECT_EQ(groups.assignment.at(name), group) << name;
    }
  }
  std::map<PopularityGroup, std::size_t> sizes;
  for (const auto& [name, g] : groups.assignment) ++sizes[g];
  EXPECT_EQ(sizes[PopularityGroup::kPolysemous], 10u);
  EXPECT_EQ(sizes[PopularityGroup::kRare], 10u);
  EXPECT_EQ(sizes[PopularityGroup::kUnknown], 10u);
  EXPECT_EQ(sizes[PopularityGroup::kFrequent], 200u);
}

NamePool SyntheticCounts(std::size_t n, std::size_t zeros) {
  std::vector<NameEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t fe = i < zeros ? 0 : (i * 7919) % 5000 + 1;
    entries.push_back(Counted("n" + std::to_string(i), fe, (i * 104729) % 3000));
  }
  return NamePool(std::move(entries), "synthetic");
}

TEST(PopularityGroups, GroupSizeTwoHundred) {
  const auto groups = build_popularity_groups(SyntheticCounts(1000, 300), 200, {});
  std::map<PopularityGroup, std::size_t> sizes;
  for (const auto& [name, g] : groups.assignment) ++sizes[g];
  EXPECT_EQ(sizes[PopularityGroup::kUnknown], 200u);
  EXPECT_EQ(sizes[PopularityGroup::kRare], 200u);
  EXPECT_EQ(sizes[PopularityGroup::kPolysemous], 200u);
}

TEST(PopularityGroups, ShortfallErrors) {
  try {
    build_popularity_groups(SyntheticCounts(1000, 150), 200, {});
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("short by 50"), std::string::npos);
  }
  EXPECT_THROW(build_popularity_groups(SyntheticCounts(40, 20), 11, {}),
               InvalidArgument);
}

TEST(RaceGroups, ArgmaxAndTopK) {
  const NamePool pool = load_pool(RepoData("race_names.csv"));
  const auto groups = build_race_groups(pool, 10);
  const auto& asian = groups.at(Race::kAsian);
  EXPECT_NE(std::find(asian.begin(), asian.end(), "Kong"), asian.end());
  const std::map<Race, std::vector<std::string>> expected = {
      {Race::kWhite, {"Kim", "Georgia", "Joseph", "Mark", "Martin", "James",
                      "William", "Barbara", "Richard", "Victoria"}},
      {Race::kHispanic, {"Sofia", "Daisy", "Luis", "Manuel", "Dora", "Emilia",
                         "Minerva", "Antonio", "Oscar", "Francisco"}},
      {Race::kBlack, {"Kenya", "Ebony", "Anderson", "Kelvin", "Dexter",
                      "Cleveland", "Percy", "Mamie", "Jarvis", "Essie"}},
      {Race::kAsian, {"Kong", "Muhammad", "Gang", "Mai", "Chi", "Krishna",
                      "Can", "Wan", "Wang", "Ferdinand"}}};
  for (const auto& [race, names] : expected) {
    auto got = groups.at(race);
    auto want = names;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want) << race_name(race);
  }
  for (const auto& [race, names] : build_race_groups(pool, 50)) {
    EXPECT_LE(names.size(), 50u);
  }
}

TEST(RaceGroups, ArgmaxTieGoesToFirstRace) {
  NameEntry a;
  a.name = "A";
  a.f_exact = 1;
  a.race_probabilities = std::array<double, 4>{0.9, 0.1, 0.0, 0.0};
  NameEntry b;
  b.name = "B";
  b.f_exact = 1;
  b.race_probabilities = std::array<double, 4>{0.0, 0.5, 0.5, 0.0};
  const auto groups = build_race_groups(NamePool({a, b}, "t"), 5);
  EXPECT_EQ(groups.at(Race::kWhite), std::vector<std::string>{"A"});
  EXPECT_EQ(groups.at(Race::kHispanic), std::vector<std::string>{"B"});
}

TEST(CountExact, WordBoundaryCounts) {
  const std::vector<std::string> names = {"June", "Ann"};
  const std::vector<std::string> texts = {"June came in June.", "Ann's Annex",
                                          "june"};
  const auto counts = count_exact_occurrences(names, texts);
  EXPECT_EQ(counts.at("June"), 2u);
  EXPECT_EQ(counts.at("Ann"), 1u);
}

}  // namespace
}  // namespace speaker_sense
