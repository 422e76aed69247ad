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

#include "speaker_sense/cli.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "speaker_sense/losskernel.h"
#include "speaker_sense/modelclient.h"
#include "speaker_sense/perturb.h"
#include "speaker_sense/sensitivity.h"
#include "speaker_sense/stub_server.h"
#include "test_util.h"

namespace speaker_sense {
namespace {

using testing::ReadFile;
using testing::RepoData;
using testing::TempDir;
using testing::TestData;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "speaker_sense");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t Lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Cli, PerturbChangeAll) {
  TempDir dir;
  const auto r = RunCli({"perturb", "--corpus", TestData("corpus3.jsonl"), "--pool",
                      RepoData("frequent_names.csv"), "-T", "5", "--seed", "3",
                      "--out", dir.path()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string text = ReadFile(dir.file("variants.jsonl"));
  EXPECT_EQ(Lines(text), 15u);
  EXPECT_NE(r.out.find("15 variants"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir.file("run.json")));

  TempDir again;
  RunCli({"perturb", "--corpus", TestData("corpus3.jsonl"), "--pool",
       RepoData("frequent_names.csv"), "-T", "5", "--seed", "3", "--out",
       again.path()});
  EXPECT_EQ(ReadFile(again.file("variants.jsonl")), text);
}

TEST(Cli, PerturbIdAndChangeOne) {
  TempDir dir;
  auto r = RunCli({"perturb", "--corpus", TestData("corpus3.jsonl"), "--pool",
                "in-distribution", "--mode", "id", "--out", dir.path()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Lines(ReadFile(dir.file("variants.jsonl"))), 3u);

  TempDir one;
  r = RunCli({"perturb", "--corpus", TestData("corpus3.jsonl"), "--pool",
           RepoData("frequent_names.csv"), "--mode", "change-one", "-T", "5",
           "--out", one.path()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto sets = read_perturbation_sets(one.file("variants.jsonl"));
  std::size_t d01 = 0;
  for (const auto& s : sets) {
    if (s.sample_id == "d01") d01 += s.variants.size();
  }
  EXPECT_EQ(d01, 10u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(RunCli({}).code, kExitUsage);
  EXPECT_EQ(RunCli({"perturb", "--mode", "shuffle"}).code, kExitUsage);
  const auto r = RunCli({"evaluate", "--metrics", "rouge2,meteor", "--corpus",
                      TestData("corpus3.jsonl")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("meteor"), std::string::npos);
}

TEST(Cli, MissingGenerationsWithoutEndpoint) {
  TempDir dir;
  ::unsetenv(kEndpointEnvVar);
  RunCli({"perturb", "--corpus", TestData("corpus3.jsonl"), "--pool",
       RepoData("frequent_names.csv"), "-T", "2", "--out", dir.path()});
  const auto r = RunCli({"evaluate", "--corpus", TestData("corpus3.jsonl"), "--out",
                      dir.path()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("d01/t0"), std::string::npos);
}

TEST(Cli, ConstantModelIsInsensitive) {
  StubOptions o;
  o.mode = StubMode::kConstant;
  o.constant = "Someone baked cookies.";
  StubServer server(o);
  server.start();
  TempDir dir;
  const std::string corpus = TestData("corpus3.jsonl");
  ASSERT_EQ(RunCli({"perturb", "--corpus", corpus, "--pool",
                 RepoData("frequent_names.csv"), "-T", "5", "--out", dir.path()})
                .code,
            kExitOk);
  auto r = RunCli({"evaluate", "--corpus", corpus, "--out", dir.path(),
                "--endpoint", server.endpoint()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Lines(ReadFile(dir.file("generations.jsonl"))), 15u);
  r = RunCli({"sensitivity", "--out", dir.path(), "--corpus", corpus});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto report =
      report_from_json(ReadFile(dir.file("report.json")), "report.json");
  ASSERT_EQ(report.metric_ids.size(), 3u);
  for (const auto& [id, m] : report.macro) {
    EXPECT_EQ(m.s, 0.0) << id;
    EXPECT_EQ(m.r, 0.0) << id;
    EXPECT_NEAR(m.d, 0.0, 1e-12) << id;
  }
  EXPECT_EQ(report.meta.variants_per_sample, 5u);
  EXPECT_TRUE(std::filesystem::exists(dir.file("report.txt")));
  EXPECT_TRUE(std::filesystem::exists(dir.file("per_sample.csv")));

  r = RunCli({"report", "--report", dir.file("report.json")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("pool="), std::string::npos);
}

TEST(Cli, Groups) {
  TempDir dir;
  const auto r = RunCli({"groups", "--pool", RepoData("example_group_names.csv"),
                      "--frequent", RepoData("frequent_names.csv"), "-G", "10",
                      "--out", dir.path()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = ReadFile(dir.file("groups.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,group,u,rank_exact,rank_ner");
  EXPECT_EQ(Lines(csv), 1u + 200u + 30u);
}

TEST(Cli, Losscheck) {
  TempDir dir;
  for (int k = 0; k < 2; ++k) {
    CrossAttentionTensor ca{Tensor({1, 1, 2}, {0.5 + 0.1 * k, 0.5 - 0.1 * k}), {}, false};
    write_cross_attention(ca, dir.file("ca" + std::to_string(k) + ".bin"));
    DecoderHiddenTensor dh{Tensor::matrix({{0.0, 2.0 * k}}), {false, false}};
    write_decoder_hidden(dh, dir.file("dh" + std::to_string(k) + ".bin"));
  }
  const auto r = RunCli({"losscheck", "--ca", dir.file("ca0.bin"), dir.file("ca1.bin"),
                      "--dh", dir.file("dh0.bin"), dir.file("dh1.bin"),
                      "--l-gen", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "alpha=1 beta=10 l_gen=1");
  EXPECT_NE(r.out.find("L_dh=2\n"), std::string::npos);
  EXPECT_NE(r.out.find("L_total=21.01"), std::string::npos);
}

}  // namespace
}  // namespace speaker_sense
