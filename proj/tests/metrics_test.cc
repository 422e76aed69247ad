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

#include "speaker_sense/metrics.h"

#include <gtest/gtest.h>

#include <cmath>

#include "speaker_sense/errors.h"
#include "speaker_sense/stub_server.h"

namespace speaker_sense {
namespace {

TEST(Tokenize, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("Hannah needs Betty's number."),
            (TokenSeq{"hannah", "needs", "betty", "s", "number"}));
  EXPECT_EQ(tokenize("A  b\xE2\x80\x94" "c"), (TokenSeq{"a", "b", "c"}));
  EXPECT_EQ(tokenize("Zo\xC3\xAB's CAF\xC3\x89 :-)"),
            (TokenSeq{"zo\xC3\xAB", "s", "caf\xC3\xA9"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" ,.!? \xF0\x9F\x98\x80").empty());
}

TEST(Tokenize, Stemming) {
  TokenizerConfig c;
  c.stem = true;
  EXPECT_EQ(tokenize("The cats were running", c),
            (TokenSeq{"the", "cat", "were", "run"}));
}

TEST(PorterStem, ClassicExamples) {
  EXPECT_EQ(porter_stem("caresses"), "caress");
  EXPECT_EQ(porter_stem("ponies"), "poni");
  EXPECT_EQ(porter_stem("relational"), "relat");
  EXPECT_EQ(porter_stem("hopping"), "hop");
  EXPECT_EQ(porter_stem("generalizations"), "gener");
  EXPECT_EQ(porter_stem("sky"), "sky");
  EXPECT_EQ(porter_stem("caf\xC3\xA9s"), "caf\xC3\xA9s");
}

TEST(Rouge, FrozenValues) {
  EXPECT_NEAR(rouge_n_f1("the cat sat", "the cat ran", 1), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(rouge_n_f1("a b c d", "a b c e", 2), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(rouge_l_f1("a b c d", "a c b d"), 0.75, 1e-12);
  // Clipping: three candidate "a" against one reference "a".
  EXPECT_NEAR(rouge_n_f1("a a a", "a b", 1), 2 * (1.0 / 3) * 0.5 / (1.0 / 3 + 0.5),
              1e-12);
  EXPECT_EQ(rouge_n_f1("a", "a b", 2), 0.0);
  EXPECT_EQ(rouge_n_f1("", "", 1), 0.0);
  EXPECT_EQ(rouge_l_f1("x y", "a b"), 0.0);
  EXPECT_EQ(rouge_n_f1("a b c", "a b c", 3), 1.0);
}

TEST(Bleu, FrozenValues) {
  EXPECT_NEAR(bleu("a b c d", "a b c d e"), std::exp(-0.25), 1e-12);
  EXPECT_NEAR(bleu("a b c d", "a b c d"), 1.0, 1e-12);
  EXPECT_NEAR(bleu("a b x y", "a b c d"), std::pow(1.0 / 48.0, 0.25), 1e-12);
  // Two-token candidate uses orders 1 and 2 only.
  EXPECT_NEAR(bleu("a b", "a b"), 1.0, 1e-12);
  EXPECT_EQ(bleu("", "a"), 0.0);
  EXPECT_EQ(bleu("a", ""), 0.0);
}

TEST(Metric, FactoryAndSymmetry) {
  for (const auto& name : default_metric_names()) {
    const auto m = make_metric(name);
    EXPECT_EQ(m->id(), name);
  }
  EXPECT_TRUE(make_metric("rouge2")->symmetric());
  EXPECT_TRUE(make_metric("rougeL")->symmetric());
  EXPECT_FALSE(make_metric("bleu")->symmetric());
  const auto r2 = make_metric("rouge2");
  EXPECT_DOUBLE_EQ(r2->score("a b c d e", "a b c"), r2->score("a b c", "a b c d e"));
  EXPECT_THROW(make_metric("meteor"), InvalidArgument);
  EXPECT_THROW(make_metric("rouge5"), InvalidArgument);
  EXPECT_THROW(make_metric("external:x"), InvalidArgument);
}

TEST(ExternalScorer, TalksToStub) {
  StubServer server;
  server.start();
  ExternalScorer scorer(server.endpoint(), "exact");
  EXPECT_EQ(scorer.score("same", "same"), 1.0);
  EXPECT_EQ(scorer.score("a", "b"), 0.0);
  EXPECT_EQ(scorer.score("same", "same"), 1.0);
  EXPECT_EQ(scorer.requests_sent(), 2u);
  EXPECT_EQ(scorer.cache_size(), 2u);

  const auto m = make_metric("external:exact", {}, server.endpoint());
  EXPECT_EQ(m->id(), "external:exact");
  EXPECT_FALSE(m->symmetric());
  EXPECT_EQ(m->score("x", "x"), 1.0);
  server.stop();
}

TEST(ExternalScorer, UnreachableIsRetriable) {
  RetryPolicy fast;
  fast.max_attempts = 2;
  fast.initial_backoff = std::chrono::milliseconds(1);
  fast.timeout = std::chrono::milliseconds(500);
  ExternalScorer scorer("http://127.0.0.1:1", "x", fast);
  EXPECT_THROW(scorer.score("a", "b"), RetriableError);
}

}  // namespace
}  // namespace speaker_sense
