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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "speaker_sense/errors.h"
#include "test_util.h"

namespace speaker_sense {
namespace {

using testing::RepoData;
using testing::TestData;

Sample MakeSample(std::vector<Utterance> turns, std::string reference,
                  std::optional<std::string> context = std::nullopt) {
  Sample s;
  s.id = "x1";
  s.dialogue = std::move(turns);
  s.reference = std::move(reference);
  s.context = std::move(context);
  return s;
}

NamePool Pool(std::vector<std::string> names) {
  return NamePool::from_names(names, "test");
}

NameMapping Mapping(std::vector<std::pair<std::string, std::string>> pairs) {
  NameMapping m;
  m.pairs = std::move(pairs);
  return m;
}

TEST(Seeds, DeriveSeedIsStableAndDistinct) {
  // Frozen values guard against accidental changes to the mixing function.
  EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(fnv1a64(""), 0xCBF29CE484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xAF63DC4C8601EC8CULL);
  EXPECT_NE(derive_seed(1, "s", 0), derive_seed(1, "s", 1));
  EXPECT_NE(derive_seed(1, "s", 0), derive_seed(1, "t", 0));
  EXPECT_NE(derive_seed(1, "s", 0, 0), derive_seed(1, "s", 0, 1));
  EXPECT_EQ(derive_seed(9, "abc", 3, 4), derive_seed(9, "abc", 3, 4));
}

TEST(Seeds, UniformIndexInRange) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.uniform_index(7), 7u);
  EXPECT_THROW(rng.uniform_index(0), InvalidArgument);
}

TEST(SampleMapping, DegeneratePoolKeepsName) {
  const std::vector<std::string> p = {"A"};
  const auto m = sample_mapping(p, Pool({"A"}), {}, 3);
  EXPECT_EQ(m.pairs, (std::vector<std::pair<std::string, std::string>>{{"A", "A"}}));
  MappingConstraints strict;
  strict.strict_change = true;
  EXPECT_THROW(sample_mapping(p, Pool({"A"}), strict, 3), InfeasibleError);
}

TEST(SampleMapping, DeterministicPerSeed) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const std::vector<std::string> p = {"Amanda", "Jerry", "Kate"};
  EXPECT_EQ(sample_mapping(p, pool, {}, 7), sample_mapping(p, pool, {}, 7));
  EXPECT_NE(sample_mapping(p, pool, {}, 7).pairs,
            sample_mapping(p, pool, {}, 8).pairs);
}

TEST(SampleMapping, InfeasibleNamesSpeaker) {
  const std::vector<std::string> p = {"X", "Y", "Z"};
  try {
    sample_mapping(p, Pool({"A", "B"}), {}, 1);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.speaker(), "Z");
  }
}

TEST(SampleMapping, RespectsForbiddenAndGender) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  MappingConstraints c;
  c.gender_consistent = true;
  c.speaker_genders = {{"Pat", Gender::kFemale}, {"Sam", Gender::kMale}};
  for (const auto& e : pool.entries()) {
    if (e.name != "Mary" && e.name != "James" && e.name != "John") {
      c.forbidden.insert(e.name);
    }
  }
  const std::vector<std::string> p = {"Pat", "Sam"};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto m = sample_mapping(p, pool, c, seed);
    EXPECT_EQ(m.pairs[0].second, "Mary");
    EXPECT_TRUE(m.pairs[1].second == "James" || m.pairs[1].second == "John");
  }
}

TEST(SampleMapping, OwnNameAllowedDespiteMention) {
  const std::vector<std::string> p = {"A"};
  MappingConstraints c;
  c.forbidden = {"A", "B"};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(sample_mapping(p, Pool({"A", "B"}), c, seed).pairs[0].second, "A");
  }
}

TEST(SampleMapping, UniformOverPool) {
  // 10 000 draws per position over 200 names. Per position the chi-square
  // statistic stays within 3 sigma of its mean (df = 199, sigma = sqrt(2 df));
  // per name, counts stay within a Bonferroni-adjusted 4.5 sigma of 50.
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const std::vector<std::string> p = {"Xa", "Xb", "Xc"};
  std::vector<std::map<std::string, int>> counts(3);
  constexpr int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    const auto m = sample_mapping(p, pool, {}, derive_seed(42, "u", t));
    ASSERT_TRUE(m.is_injective());
    for (int k = 0; k < 3; ++k) ++counts[k][m.pairs[k].second];
  }
  const double expected = kTrials / 200.0;
  const double sigma = std::sqrt(expected * (1.0 - 1.0 / 200.0));
  const double df = 199.0;
  for (int k = 0; k < 3; ++k) {
    double chi2 = 0.0;
    for (const auto& name : pool.names()) {
      const int c = counts[k].count(name) ? counts[k].at(name) : 0;
      EXPECT_LE(std::abs(c - expected), 4.5 * sigma) << name << " pos " << k;
      chi2 += (c - expected) * (c - expected) / expected;
    }
    EXPECT_LE(std::abs(chi2 - df), 3.0 * std::sqrt(2.0 * df)) << "position " << k;
  }
}

TEST(ReplaceNames, Examples) {
  const Sample s = MakeSample({{"John", "I agree"}}, "Tom invited Ann.");
  const Sample r = replace_names(s, Mapping({{"John", "Robinson"}}));
  EXPECT_EQ(r.dialogue[0].speaker, "Robinson");
  EXPECT_EQ(r.dialogue[0].text, "I agree");
  EXPECT_EQ(replace_names(s, Mapping({})), s);
  const Sample t = MakeSample({{"Tom", "hi Ann"}, {"Ann", "hi"}}, "Tom invited Ann.");
  const Sample u = replace_names(t, Mapping({{"Tom", "Roy"}, {"Ann", "Joan"}}));
  EXPECT_EQ(u.reference, "Roy invited Joan.");
  EXPECT_EQ(u.dialogue[0].text, "hi Joan");
  EXPECT_EQ(u.id, t.id);
}

TEST(ReplaceNames, ContextAndPossessives) {
  const Sample s = MakeSample({{"Betty", "It's Betty's."}}, "Betty's bag.",
                              "Betty and Bettye");
  const Sample r = replace_names(s, Mapping({{"Betty", "Joan"}}));
  EXPECT_EQ(r.dialogue[0].text, "It's Joan's.");
  EXPECT_EQ(*r.context, "Joan and Bettye");
  EXPECT_EQ(r.reference, "Joan's bag.");
}

TEST(BackSubstitute, Examples) {
  const auto f = Mapping({{"John", "Robinson"}});
  EXPECT_EQ(back_substitute("Robinson wants tea", f), "John wants tea");
  EXPECT_EQ(back_substitute("Robinson wants tea", Mapping({})),
            "Robinson wants tea");
  EXPECT_EQ(back_substitute("Robinsonade and Robinson's", f),
            "Robinsonade and John's");
  EXPECT_THROW(back_substitute("x", Mapping({{"A", "C"}, {"B", "C"}})),
               InvalidArgument);
}

TEST(MakeTestVariants, CountIdsAndDeterminism) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const Corpus corpus = parse_corpus(TestData("corpus3.jsonl"));
  const auto set = make_test_variants(corpus.samples[0], pool, 5, 11);
  ASSERT_EQ(set.variants.size(), 5u);
  EXPECT_EQ(set.variants[4].variant_id, "t4");
  const std::vector<PerturbationSet> a = {set};
  const std::vector<PerturbationSet> b = {
      make_test_variants(corpus.samples[0], pool, 5, 11)};
  EXPECT_EQ(serialize_perturbation_sets(a), serialize_perturbation_sets(b));
}

TEST(MakeTestVariants, OriginalOnlyPoolGivesOriginal) {
  const Sample s = MakeSample({{"A", "hi B"}, {"B", "yo"}}, "A greets B.");
  const auto set = make_test_variants(s, Pool({"A", "B"}), 1, 5);
  EXPECT_EQ(set.variants[0].sample, s);
}

TEST(MakeTestVariants, AvoidsMentionedPoolNames) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const Sample s = MakeSample({{"Sam", "Ask Mary or John."}, {"Naomi", "ok"}},
                              "Sam asks.");
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    for (const auto& v : make_test_variants(s, pool, 5, seed).variants) {
      for (const auto& [from, to] : v.mapping.pairs) {
        EXPECT_NE(to, "Mary");
        EXPECT_NE(to, "John");
      }
    }
  }
}

TEST(SingleSpeaker, CardinalityAndScope) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const Sample s = MakeSample(
      {{"Anna", "Tom?"}, {"Tom", "yes Anna"}, {"Kate", "me too"}}, "Anna, Tom, Kate.");
  const auto sets = make_single_speaker_variants(s, pool, 5, 3);
  ASSERT_EQ(sets.size(), 3u);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EXPECT_EQ(sets[i].mode, PerturbationMode::kChangeOne);
    ASSERT_EQ(sets[i].variants.size(), 5u);
    const std::string target = *sets[i].target_speaker;
    for (const auto& v : sets[i].variants) {
      ASSERT_EQ(v.mapping.pairs.size(), 1u);
      EXPECT_EQ(v.mapping.pairs[0].first, target);
      // Only occurrences of the target differ.
      Sample back = v.sample;
      for (auto& u : back.dialogue) {
        if (u.speaker == v.mapping.pairs[0].second) u.speaker = target;
        u.text = back_substitute(u.text, v.mapping);
      }
      back.reference = back_substitute(back.reference, v.mapping);
      EXPECT_EQ(back, s);
    }
  }
}

TEST(SingleSpeaker, OneSpeakerMatchesChangeAll) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const Sample s = MakeSample({{"Laura", "on my way"}, {"Laura", "15 min"}},
                              "Laura is coming.");
  const auto one = make_single_speaker_variants(s, pool, 5, 77);
  const auto all = make_test_variants(s, pool, 5, 77);
  ASSERT_EQ(one.size(), 1u);
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(one[0].variants[t].mapping, all.variants[t].mapping);
    EXPECT_EQ(one[0].variants[t].sample, all.variants[t].sample);
  }
}

TEST(IdCodes, FirstOccurrenceOrderAndIdempotence) {
  const Sample s = MakeSample({{"B", "hi A"}, {"A", "hey"}, {"B", "bye A"}},
                              "B says hi to A.");
  const Sample coded = apply_id_codes(s);
  EXPECT_EQ(coded.dialogue[0].speaker, "Speaker1");
  EXPECT_EQ(coded.dialogue[1].speaker, "Speaker2");
  EXPECT_EQ(coded.dialogue[2].text, "bye Speaker2");
  EXPECT_EQ(coded.reference, "Speaker1 says hi to Speaker2.");
  EXPECT_EQ(apply_id_codes(coded), coded);
}

TEST(Augment, KMinusOneCopiesConsistent) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const Sample s = MakeSample({{"Tom", "hi Ann"}, {"Ann", "hi Tom"}},
                              "Tom and Ann greet.");
  EXPECT_TRUE(augment_training(s, pool, 1, 5).empty());
  const auto two = augment_training(s, pool, 2, 5);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].id, "x1#aug1");
  EXPECT_EQ(augment_training(s, pool, 4, 5).size(), 3u);
  const auto set = make_augmented_set(s, pool, 2, 5);
  const auto& v = set.variants[0];
  const std::string tom = *v.mapping.replacement_of("Tom");
  const std::string ann = *v.mapping.replacement_of("Ann");
  EXPECT_EQ(v.sample.reference, tom + " and " + ann + " greet.");
  EXPECT_EQ(v.sample.dialogue[0].speaker, tom);
  EXPECT_EQ(v.sample.dialogue[0].text, "hi " + ann);
  EXPECT_THROW(augment_training(s, pool, 0, 5), InvalidArgument);
}

TEST(PerturbationSets, RoundTrip) {
  const NamePool pool = load_pool(RepoData("frequent_names.csv"));
  const Corpus corpus = parse_corpus(TestData("corpus3.jsonl"));
  std::vector<PerturbationSet> sets;
  for (const auto& s : corpus.samples) {
    sets.push_back(make_test_variants(s, pool, 3, 1));
    for (auto& one : make_single_speaker_variants(s, pool, 2, 1)) {
      sets.push_back(std::move(one));
    }
  }
  const std::string text = serialize_perturbation_sets(sets);
  const auto parsed = parse_perturbation_sets(text, "mem");
  ASSERT_EQ(parsed.size(), sets.size());
  EXPECT_EQ(serialize_perturbation_sets(parsed), text);
  EXPECT_EQ(parsed[1].target_speaker, sets[1].target_speaker);
  EXPECT_THROW(parse_perturbation_sets("{\"sample_id\":1}\n", "bad"), ParseError);
}

TEST(SpeakerPool, FirstSeenOrder) {
  const Corpus corpus = parse_corpus(TestData("corpus3.jsonl"));
  const NamePool p = speaker_pool(corpus);
  EXPECT_EQ(p.names()[0], "Amanda");
  EXPECT_EQ(p.names()[1], "Jerry");
  EXPECT_EQ(p.label(), "in-distribution");
}

}  // namespace
}  // namespace speaker_sense
