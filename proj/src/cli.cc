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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "speaker_sense/corpus.h"
#include "speaker_sense/errors.h"
#include "speaker_sense/losskernel.h"
#include "speaker_sense/metrics.h"
#include "speaker_sense/modelclient.h"
#include "speaker_sense/namepool.h"
#include "speaker_sense/perturb.h"
#include "speaker_sense/sensitivity.h"
#include "speaker_sense/stub_server.h"

namespace speaker_sense {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr char kInDistributionPool[] = "in-distribution";

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string Join(const fs::path& dir, const std::string& name) {
  return (dir / name).string();
}

std::string OrDefault(const std::string& value, const RunConfig& config,
                      const std::string& file) {
  return value.empty() ? Join(config.out, file) : value;
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path);
}

void EnsureOutDir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw Error("cannot create " + config.out + ": " + ec.message());
}

Corpus LoadCorpus(const RunConfig& config) {
  if (config.corpus.empty()) throw UsageError("--corpus is required");
  return parse_corpus(config.corpus);
}

NamePool LoadNamePool(const RunConfig& config, const Corpus& corpus) {
  if (config.pool.empty()) throw UsageError("--pool is required");
  if (config.pool == kInDistributionPool) {
    return speaker_pool(corpus, kInDistributionPool);
  }
  return load_pool(config.pool);
}

std::vector<std::string> MetricNames(const RunConfig& config) {
  return config.metrics.empty() ? default_metric_names() : config.metrics;
}

std::vector<std::unique_ptr<Metric>> MakeMetrics(const RunConfig& config) {
  std::vector<std::unique_ptr<Metric>> out;
  TokenizerConfig tok;
  tok.stem = config.stem;
  for (const auto& name : MetricNames(config)) {
    const std::string endpoint = config.scorer_endpoint.empty()
                                     ? resolve_endpoint(config.endpoint)
                                     : config.scorer_endpoint;
    out.push_back(make_metric(name, tok, endpoint));
  }
  return out;
}

PerturbOptions Options(const RunConfig& config) {
  PerturbOptions o;
  o.gender_consistent = config.gender_consistent;
  return o;
}

void CheckCounts(const RunConfig& config) {
  if (config.T < 1) throw UsageError("-T must be >= 1");
  if (config.K < 1) throw UsageError("-K must be >= 1");
}

RunMetadata LoadMetadata(const RunConfig& config, const std::string& scores) {
  RunMetadata meta;
  meta.pool_label = config.pool;
  meta.seed = config.seed;
  meta.variants_per_sample = config.T;
  meta.mode = config.mode;
  const fs::path run = fs::path(scores).parent_path() / "run.json";
  if (fs::exists(run)) {
    const json j = json::parse(ReadText(run.string()));
    meta.pool_label = j.value("pool", meta.pool_label);
    meta.seed = j.value("seed", meta.seed);
    meta.variants_per_sample = j.value("T", meta.variants_per_sample);
    meta.mode = j.value("mode", meta.mode);
  }
  return meta;
}

SensitivityReport ReportFromScores(const std::string& path,
                                   const RunMetadata& meta) {
  const auto scores = parse_variant_scores(ReadText(path), path);
  if (scores.empty()) throw Error(path + " holds no scores");
  std::vector<std::string> metric_order;
  std::vector<std::pair<std::string, std::string>> key_order;
  std::map<std::pair<std::string, std::string>, std::vector<VariantScores>>
      grouped;
  for (const auto& vs : scores) {
    if (std::find(metric_order.begin(), metric_order.end(), vs.metric_id) ==
        metric_order.end()) {
      metric_order.push_back(vs.metric_id);
    }
    const auto key = std::make_pair(vs.sample_id, vs.group);
    auto [it, inserted] = grouped.try_emplace(key);
    if (inserted) key_order.push_back(key);
    it->second.push_back(vs);
  }
  std::vector<SampleRecord> records;
  for (const auto& key : key_order) {
    records.push_back(sensitivity_record(grouped.at(key)));
  }
  SensitivityReport report = aggregate_report(std::move(records), meta);
  report.metric_ids = metric_order;
  return report;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int cmd_perturb(const RunConfig& config, std::ostream& log) {
  CheckCounts(config);
  const PerturbationMode mode = parse_mode(config.mode);
  const Corpus corpus = LoadCorpus(config);
  EnsureOutDir(config);

  std::vector<PerturbationSet> sets;
  std::string pool_label = "id";
  std::size_t per_sample = 1;
  if (mode == PerturbationMode::kIdCodes) {
    for (const auto& s : corpus.samples) {
      sets.push_back(make_test_variants(s, NamePool(), 1, 0, mode));
    }
  } else {
    const NamePool pool = LoadNamePool(config, corpus);
    pool_label = pool.label();
    const PerturbOptions options = Options(config);
    for (const auto& s : corpus.samples) {
      switch (mode) {
        case PerturbationMode::kChangeAll:
          sets.push_back(
              make_test_variants(s, pool, config.T, config.seed, mode, options));
          break;
        case PerturbationMode::kChangeOne:
          for (auto& set : make_single_speaker_variants(s, pool, config.T,
                                                        config.seed, options)) {
            sets.push_back(std::move(set));
          }
          break;
        case PerturbationMode::kAugment:
          sets.push_back(
              make_augmented_set(s, pool, config.K, config.seed, options));
          break;
        case PerturbationMode::kIdCodes:
          break;
      }
    }
    per_sample = mode == PerturbationMode::kAugment ? config.K - 1 : config.T;
  }

  const std::string path = OrDefault(config.variants, config, "variants.jsonl");
  write_perturbation_sets(sets, path);
  ordered_json run;
  run["pool"] = pool_label;
  run["seed"] = config.seed;
  run["T"] = per_sample;
  run["mode"] = std::string(mode_name(mode));
  WriteText(Join(config.out, "run.json"), run.dump(2) + "\n");

  std::size_t count = 0;
  for (const auto& s : sets) count += s.variants.size();
  log << count << " variants written to " << path << "\n";
  return kExitOk;
}

int cmd_augment(const RunConfig& config, std::ostream& log) {
  CheckCounts(config);
  const Corpus corpus = LoadCorpus(config);
  const NamePool pool = LoadNamePool(config, corpus);
  EnsureOutDir(config);
  Corpus out;
  for (const auto& s : corpus.samples) {
    out.samples.push_back(s);
    for (auto& copy :
         augment_training(s, pool, config.K, config.seed, Options(config))) {
      out.samples.push_back(std::move(copy));
    }
  }
  const std::string path = Join(config.out, "augmented.jsonl");
  write_corpus(out, path);
  log << out.samples.size() << " training samples written to " << path
      << "\n";
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config, std::ostream& log) {
  const auto metrics = MakeMetrics(config);
  const std::string variants_path =
      OrDefault(config.variants, config, "variants.jsonl");
  const auto sets = read_perturbation_sets(variants_path);
  const Corpus corpus = LoadCorpus(config);
  std::map<std::string, const Sample*> originals;
  for (const auto& s : corpus.samples) originals[s.id] = &s;
  for (const auto& set : sets) {
    if (!originals.contains(set.sample_id)) {
      throw Error("sample '" + set.sample_id + "' from " + variants_path +
                  " is not in " + config.corpus);
    }
  }
  EnsureOutDir(config);

  const std::string endpoint = resolve_endpoint(config.endpoint);
  std::unique_ptr<ModelClient> client;
  Generator generate;
  if (!endpoint.empty()) {
    client = std::make_unique<ModelClient>(endpoint, config.model);
    generate = [&client](const Sample& s) { return client->generate(s); };
  }
  GenerationCache cache(OrDefault(config.cache, config, "cache.jsonl"));
  BatchOptions options;
  options.model = config.model;
  options.parallelism = config.parallelism;
  const BatchResult batch = run_batch(sets, generate, cache, options);

  if (!batch.complete()) {
    std::string ids;
    for (const auto& f : batch.failures) {
      if (!ids.empty()) ids += ", ";
      ids += f.sample_id + "/" + f.variant_id;
    }
    if (endpoint.empty()) {
      throw Error("missing generations and no endpoint configured: " + ids);
    }
    log << batch.failures.size() << " of " << batch.records.size()
        << " generations failed (completed ones are cached; rerun to resume): "
        << ids << "\n"
        << "first error: " << batch.failures.front().error << "\n";
    return kExitIncomplete;
  }

  std::string generations;
  std::string scores;
  std::size_t index = 0;
  for (const auto& set : sets) {
    std::vector<std::string> ids, outputs;
    for (std::size_t v = 0; v < set.variants.size(); ++v, ++index) {
      const GenerationRecord& rec = *batch.records[index];
      ordered_json g;
      g["sample_id"] = rec.sample_id;
      g["variant_id"] = rec.variant_id;
      g["model"] = rec.model;
      g["raw_output"] = rec.raw_output;
      g["back_substituted"] = rec.back_substituted;
      generations += g.dump() + "\n";
      ids.push_back(rec.variant_id);
      outputs.push_back(rec.back_substituted);
    }
    const std::string group = set.target_speaker.value_or("");
    const Sample& original = *originals.at(set.sample_id);
    for (const auto& metric : metrics) {
      scores += serialize_variant_scores(score_variants(
                    set.sample_id, group, *metric, ids, outputs,
                    original.reference)) +
                "\n";
    }
  }
  WriteText(Join(config.out, "generations.jsonl"), generations);
  const std::string scores_path = Join(config.out, "scores.jsonl");
  WriteText(scores_path, scores);
  log << batch.records.size() << " generations (" << batch.cache_hits
      << " cached, " << batch.requests << " requested); scores written to "
      << scores_path << "\n";
  return kExitOk;
}

int cmd_sensitivity(const RunConfig& config, std::ostream& log) {
  const std::string scores_path = OrDefault(config.scores, config, "scores.jsonl");
  const RunMetadata meta = LoadMetadata(config, scores_path);
  SensitivityReport report = ReportFromScores(scores_path, meta);
  if (!config.compare.empty()) {
    const SensitivityReport other =
        ReportFromScores(config.compare, LoadMetadata(config, config.compare));
    report.significance = compare_reports(report, other,
                                          config.bootstrap_iterations,
                                          config.seed);
  }
  EnsureOutDir(config);
  WriteText(Join(config.out, "report.json"), report_to_json(report));
  const std::string table = report_to_table(report);
  WriteText(Join(config.out, "report.txt"), table);
  WriteText(Join(config.out, "per_sample.csv"), report_to_csv(report));

  const bool change_one = std::any_of(
      report.samples.begin(), report.samples.end(),
      [](const SampleRecord& r) { return !r.group.empty(); });
  if (change_one && !config.corpus.empty()) {
    const Corpus corpus = parse_corpus(config.corpus);
    std::map<std::string, std::vector<SpeakerFeature>> features;
    for (const auto& s : corpus.samples) {
      features[s.id] = speaker_features(s.dialogue);
    }
    for (const auto& metric : report.metric_ids) {
      std::vector<ChangeOneRecord> records;
      for (const auto& rec : report.samples) {
        auto it = features.find(rec.sample_id);
        if (it == features.end()) continue;
        for (const auto& f : it->second) {
          if (f.speaker == rec.group) {
            records.push_back({rec.sample_id, f, rec.metrics.at(metric).d});
          }
        }
      }
      const auto rows = speaker_trends(records);
      WriteText(Join(config.out, "trends_" + metric + ".csv"),
                trends_to_csv(rows));
    }
  }
  log << table;
  return kExitOk;
}

int cmd_groups(const RunConfig& config, std::ostream& log) {
  if (config.pool.empty()) throw UsageError("--pool is required");
  const NamePool pool = load_pool(config.pool);
  std::vector<std::string> frequent;
  if (!config.frequent.empty()) frequent = load_pool(config.frequent).names();
  const PopularityGroups groups =
      build_popularity_groups(pool, config.group_size, frequent);
  EnsureOutDir(config);

  std::map<PopularityGroup, std::vector<std::string>> by_group;
  for (const auto& [name, g] : groups.assignment) by_group[g].push_back(name);
  std::string csv = "name,group,u,rank_exact,rank_ner\n";
  for (const auto& [g, names] : by_group) {
    for (const auto& name : names) {
      std::string u, re, rn;
      if (auto it = groups.uniqueness.find(name); it != groups.uniqueness.end()) {
        u = Num(it->second);
      }
      if (auto it = groups.rank_exact.find(name); it != groups.rank_exact.end()) {
        re = std::to_string(it->second);
      }
      if (auto it = groups.rank_ner.find(name); it != groups.rank_ner.end()) {
        rn = std::to_string(it->second);
      }
      csv += name + "," + std::string(popularity_group_name(g)) + "," + u +
             "," + re + "," + rn + "\n";
    }
    log << popularity_group_name(g) << ": " << names.size() << " names\n";
  }
  WriteText(Join(config.out, "groups.csv"), csv);

  if (config.race_top_k > 0) {
    std::string race_csv = "name,race\n";
    for (const auto& [race, names] : build_race_groups(pool, config.race_top_k)) {
      for (const auto& name : names) {
        race_csv += name + "," + std::string(race_name(race)) + "\n";
      }
      log << race_name(race) << ": " << names.size() << " names\n";
    }
    WriteText(Join(config.out, "race_groups.csv"), race_csv);
  }
  return kExitOk;
}

int cmd_losscheck(const RunConfig& config, std::ostream& log) {
  if (config.cross_attention.empty() && config.decoder_hidden.empty()) {
    throw UsageError("give --ca and/or --dh tensor files");
  }
  double l_ca = 0.0, l_dh = 0.0;
  if (!config.cross_attention.empty()) {
    std::vector<PooledAttention> pooled;
    for (const auto& path : config.cross_attention) {
      const CrossAttentionTensor ca = read_cross_attention(path);
      validate_attention(ca);
      pooled.push_back(pool(ca));
    }
    l_ca = cross_attention_loss(unify_attention(pooled));
  }
  if (!config.decoder_hidden.empty()) {
    std::vector<DecoderHiddenTensor> hidden;
    for (const auto& path : config.decoder_hidden) {
      hidden.push_back(read_decoder_hidden(path));
    }
    l_dh = decoder_hidden_loss(unify_hidden(hidden));
  }
  const double total =
      total_loss(config.l_gen, l_ca, l_dh, {config.alpha, config.beta});
  log << "alpha=" << Num(config.alpha) << " beta=" << Num(config.beta)
      << " l_gen=" << Num(config.l_gen) << "\n"
      << "L_ca=" << Num(l_ca) << "\n"
      << "L_dh=" << Num(l_dh) << "\n"
      << "L_total=" << Num(total) << "\n";
  return kExitOk;
}

int cmd_report(const RunConfig& config, std::ostream& log) {
  if (config.report.empty()) throw UsageError("--report is required");
  SensitivityReport report =
      report_from_json(ReadText(config.report), config.report);
  if (!config.compare.empty()) {
    const SensitivityReport other =
        report_from_json(ReadText(config.compare), config.compare);
    report.significance = compare_reports(report, other,
                                          config.bootstrap_iterations,
                                          config.seed);
    EnsureOutDir(config);
    WriteText(Join(config.out, "report_compared.json"), report_to_json(report));
  }
  log << report_to_table(report);
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Speaker-name sensitivity toolkit", "speaker_sense"};
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&c](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--seed", c.seed, "Global seed");
  };
  auto pipeline = [&c](CLI::App* sub) {
    sub->add_option("--corpus", c.corpus, "Corpus (JSON Lines)");
    sub->add_option("--pool", c.pool,
                    "Name pool file or 'in-distribution'");
    sub->add_option("--mode", c.mode, "change-all|change-one|augment|id")
        ->check(CLI::IsMember({"change-all", "change-one", "augment", "id"}));
    sub->add_option("-T", c.T, "Variants per test sample");
    sub->add_option("-K", c.K, "Augmentation factor");
    sub->add_flag("--gender-consistent", c.gender_consistent,
                  "Keep replacement gender equal to the original");
  };

  auto* perturb = app.add_subcommand("perturb", "Write name-substituted variants");
  common(perturb);
  pipeline(perturb);
  perturb->add_option("--variants", c.variants, "Variants file to write");

  auto* augment = app.add_subcommand("augment", "Augment a training corpus");
  common(augment);
  pipeline(augment);

  auto* evaluate =
      app.add_subcommand("evaluate", "Generate outputs and score variants");
  common(evaluate);
  pipeline(evaluate);
  evaluate->add_option("--variants", c.variants, "Variants file");
  evaluate->add_option("--metrics", c.metrics, "Metric names")->delimiter(',');
  evaluate->add_option("--endpoint", c.endpoint, "Model service URL");
  evaluate->add_option("--cache", c.cache, "Generation cache file");
  evaluate->add_option("--model", c.model, "Model id sent to the service");
  evaluate->add_option("--parallelism", c.parallelism,
                       "Maximum concurrent requests");
  evaluate->add_option("--scorer-endpoint", c.scorer_endpoint,
                       "Service for external:<id> metrics");
  evaluate->add_flag("--stem", c.stem, "Porter-stem tokens before scoring");

  auto* sensitivity =
      app.add_subcommand("sensitivity", "Compute S, R and D reports");
  common(sensitivity);
  pipeline(sensitivity);
  sensitivity->add_option("--scores", c.scores, "Scores file");
  sensitivity->add_option("--compare", c.compare,
                          "Scores file of a second system");
  sensitivity->add_option("--iterations", c.bootstrap_iterations,
                          "Bootstrap iterations");

  auto* groups = app.add_subcommand("groups", "Build name groups");
  common(groups);
  groups->add_option("--pool", c.pool, "Counts table")->required();
  groups->add_option("--frequent", c.frequent, "Frequent-name list");
  groups->add_option("-G,--group-size", c.group_size, "Names per group");
  groups->add_option("--race-top-k", c.race_top_k, "Names per race group");

  auto* losscheck =
      app.add_subcommand("losscheck", "Evaluate insensitivity losses");
  common(losscheck);
  losscheck->add_option("--ca", c.cross_attention,
                        "Cross-attention tensor files, one per variant");
  losscheck->add_option("--dh", c.decoder_hidden,
                        "Decoder hidden-state files, one per variant");
  losscheck->add_option("--alpha", c.alpha, "Cross-attention loss weight");
  losscheck->add_option("--beta", c.beta, "Hidden-state loss weight");
  losscheck->add_option("--l-gen", c.l_gen, "Generation loss");

  auto* report = app.add_subcommand("report", "Print or compare reports");
  common(report);
  report->add_option("--report", c.report, "report.json")->required();
  report->add_option("--compare", c.compare, "Second report.json");
  report->add_option("--iterations", c.bootstrap_iterations,
                     "Bootstrap iterations");

  auto* stub = app.add_subcommand("stub-server", "Run a local stub model service");
  std::string stub_mode = "echo", stub_constant = "ok", stub_host = "127.0.0.1";
  int stub_port = 8080;
  stub->add_option("--mode", stub_mode, "echo|constant")
      ->check(CLI::IsMember({"echo", "constant"}));
  stub->add_option("--constant", stub_constant, "Output in constant mode");
  stub->add_option("--host", stub_host, "Bind address");
  stub->add_option("--port", stub_port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (evaluate->parsed()) {
      try {
        MakeMetrics(c);
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
    }
    if (perturb->parsed()) return cmd_perturb(c, out);
    if (augment->parsed()) return cmd_augment(c, out);
    if (evaluate->parsed()) return cmd_evaluate(c, out);
    if (sensitivity->parsed()) return cmd_sensitivity(c, out);
    if (groups->parsed()) return cmd_groups(c, out);
    if (losscheck->parsed()) return cmd_losscheck(c, out);
    if (report->parsed()) return cmd_report(c, out);
    if (stub->parsed()) {
      StubOptions options;
      options.mode = parse_stub_mode(stub_mode);
      options.constant = stub_constant;
      StubServer server(options);
      out << "serving " << stub_mode << " stub on http://" << stub_host << ":"
          << stub_port << std::endl;
      server.listen(stub_host, stub_port);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace speaker_sense
