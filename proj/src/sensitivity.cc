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

#include "speaker_sense/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "csv.h"
#include "json.hpp"
#include "speaker_sense/errors.h"
#include "speaker_sense/random.h"

namespace speaker_sense {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kSymmetryTolerance = 1e-12;

double Mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::string GroupKey(const SampleRecord& r) {
  return r.sample_id + '\x1f' + r.group;
}

double Statistic(const MetricSensitivity& m, std::string_view stat) {
  if (stat == "mean") return m.mean;
  if (stat == "S") return m.s;
  if (stat == "R") return m.r;
  return m.d;
}

constexpr std::string_view kStatistics[] = {"mean", "S", "R", "D"};

ordered_json StatsJson(const MetricSensitivity& m) {
  ordered_json j;
  j["mean"] = m.mean;
  j["S"] = m.s;
  j["R"] = m.r;
  j["D"] = m.d;
  return j;
}

MetricSensitivity StatsFromJson(const json& j) {
  MetricSensitivity m;
  m.mean = j.at("mean").get<double>();
  m.s = j.at("S").get<double>();
  m.r = j.at("R").get<double>();
  m.d = j.at("D").get<double>();
  return m;
}

std::string BinLabel(const std::vector<std::size_t>& lows, std::size_t i) {
  if (i + 1 == lows.size()) return std::to_string(lows[i]) + "+";
  const std::size_t hi = lows[i + 1] - 1;
  if (hi == lows[i]) return std::to_string(lows[i]);
  return std::to_string(lows[i]) + "-" + std::to_string(hi);
}

void AppendTrend(std::string_view feature, const std::vector<std::size_t>& lows,
                 std::span<const ChangeOneRecord> records,
                 std::size_t SpeakerFeature::*field,
                 std::vector<TrendRow>& out) {
  if (lows.empty()) return;
  for (std::size_t i = 1; i < lows.size(); ++i) {
    if (lows[i] <= lows[i - 1]) {
      throw InvalidArgument("trend bin bounds must be strictly ascending");
    }
  }
  std::vector<double> sums(lows.size(), 0.0);
  std::vector<std::size_t> counts(lows.size(), 0);
  for (const auto& r : records) {
    const std::size_t v = r.feature.*field;
    auto it = std::upper_bound(lows.begin(), lows.end(), v);
    if (it == lows.begin()) continue;  // below the first bin
    const std::size_t bin = static_cast<std::size_t>(it - lows.begin()) - 1;
    sums[bin] += r.value;
    ++counts[bin];
  }
  for (std::size_t i = 0; i < lows.size(); ++i) {
    if (counts[i] == 0) continue;
    out.push_back({std::string(feature), BinLabel(lows, i),
                   sums[i] / static_cast<double>(counts[i]), counts[i]});
  }
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
  return buf;
}

std::string Number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

VariantScores score_variants(const std::string& sample_id,
                             const std::string& group, const Metric& metric,
                             std::span<const std::string> variant_ids,
                             std::span<const std::string> outputs,
                             std::string_view reference) {
  if (variant_ids.size() != outputs.size()) {
    throw InvalidArgument("variant ids and outputs differ in length");
  }
  VariantScores vs;
  vs.sample_id = sample_id;
  vs.group = group;
  vs.metric_id = metric.id();
  vs.symmetric = metric.symmetric();
  vs.variant_ids.assign(variant_ids.begin(), variant_ids.end());
  const std::size_t t = outputs.size();
  vs.pairwise.assign(t, std::vector<double>(t, 1.0));
  for (std::size_t i = 0; i < t; ++i) {
    vs.vs_reference.push_back(metric.score(outputs[i], reference));
    for (std::size_t j = 0; j < t; ++j) {
      if (i == j) continue;
      if (vs.symmetric && j < i) {
        vs.pairwise[i][j] = vs.pairwise[j][i];
      } else {
        vs.pairwise[i][j] = metric.score(outputs[i], outputs[j]);
      }
    }
  }
  return vs;
}

double pairwise_sensitivity(const VariantScores& vs) {
  const std::size_t t = vs.pairwise.size();
  if (t < 2) {
    throw InvalidArgument("pairwise sensitivity needs at least 2 variants, got " +
                          std::to_string(t));
  }
  for (const auto& row : vs.pairwise) {
    if (row.size() != t) {
      throw InvalidArgument("pairwise score matrix is not square");
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) {
      if (i == j) continue;
      if (vs.symmetric &&
          std::abs(vs.pairwise[i][j] - vs.pairwise[j][i]) > kSymmetryTolerance) {
        throw InvalidArgument("metric '" + vs.metric_id +
                              "' is symmetric but its pairwise scores are not");
      }
      sum += 1.0 - vs.pairwise[i][j];
    }
  }
  return sum / static_cast<double>(t * (t - 1));
}

double score_range(std::span<const double> vs_reference) {
  if (vs_reference.empty()) return 0.0;
  const auto [lo, hi] =
      std::minmax_element(vs_reference.begin(), vs_reference.end());
  return *hi - *lo;
}

double score_deviation(std::span<const double> vs_reference) {
  if (vs_reference.empty()) return 0.0;
  const double mean = Mean(vs_reference);
  double ss = 0.0;
  for (double v : vs_reference) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(vs_reference.size()));
}

SampleRecord sensitivity_record(std::span<const VariantScores> per_metric) {
  if (per_metric.empty()) throw InvalidArgument("no metric scores for sample");
  SampleRecord rec;
  rec.sample_id = per_metric.front().sample_id;
  rec.group = per_metric.front().group;
  for (const auto& vs : per_metric) {
    if (vs.sample_id != rec.sample_id || vs.group != rec.group) {
      throw InvalidArgument("scores for '" + vs.sample_id +
                            "' mixed into record for '" + rec.sample_id + "'");
    }
    if (vs.vs_reference.size() != vs.pairwise.size()) {
      throw InvalidArgument("sample '" + vs.sample_id + "' metric '" +
                            vs.metric_id + "': vs_reference has " +
                            std::to_string(vs.vs_reference.size()) +
                            " entries but the pairwise matrix has " +
                            std::to_string(vs.pairwise.size()) + " rows");
    }
    MetricSensitivity m;
    m.mean = Mean(vs.vs_reference);
    m.s = pairwise_sensitivity(vs);
    m.r = score_range(vs.vs_reference);
    m.d = score_deviation(vs.vs_reference);
    rec.metrics[vs.metric_id] = m;
  }
  return rec;
}

SensitivityReport aggregate_report(std::vector<SampleRecord> records,
                                   RunMetadata meta) {
  if (records.empty()) throw InvalidArgument("cannot aggregate zero samples");
  SensitivityReport report;
  report.meta = std::move(meta);
  for (const auto& [id, _] : records.front().metrics) {
    report.metric_ids.push_back(id);
  }
  for (const auto& rec : records) {
    if (rec.metrics.size() != report.metric_ids.size()) {
      throw InvalidArgument("sample '" + rec.sample_id +
                            "' has a different metric set");
    }
    for (const auto& id : report.metric_ids) {
      if (!rec.metrics.contains(id)) {
        throw InvalidArgument("sample '" + rec.sample_id + "' lacks metric '" +
                              id + "'");
      }
    }
  }
  const double n = static_cast<double>(records.size());
  for (const auto& id : report.metric_ids) {
    MetricSensitivity sum;
    for (const auto& rec : records) {
      const auto& m = rec.metrics.at(id);
      sum.mean += m.mean;
      sum.s += m.s;
      sum.r += m.r;
      sum.d += m.d;
    }
    report.macro[id] = {sum.mean / n, sum.s / n, sum.r / n, sum.d / n};
  }
  report.samples = std::move(records);
  return report;
}

double paired_significance(std::span<const double> system_a,
                           std::span<const double> system_b,
                           std::size_t iterations, std::uint64_t seed) {
  if (system_a.size() != system_b.size()) {
    throw InvalidArgument("paired samples differ in length: " +
                          std::to_string(system_a.size()) + " vs " +
                          std::to_string(system_b.size()));
  }
  const std::size_t n = system_a.size();
  if (n < 2) throw InvalidArgument("paired bootstrap needs at least 2 samples");
  if (iterations == 0) throw InvalidArgument("iterations must be positive");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = system_a[i] - system_b[i];
  const double observed = Mean(d);

  Rng rng(seed);
  std::size_t extreme = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += d[rng.uniform_index(n)];
    const double resampled = sum / static_cast<double>(n);
    if (std::abs(resampled - observed) >= std::abs(observed)) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(iterations + 1);
}

SignificanceTable compare_reports(const SensitivityReport& a,
                                  const SensitivityReport& b,
                                  std::size_t iterations, std::uint64_t seed) {
  std::map<std::string, const SampleRecord*> by_key;
  for (const auto& rec : b.samples) by_key[GroupKey(rec)] = &rec;

  SignificanceTable table;
  for (const auto& metric : a.metric_ids) {
    if (!b.macro.contains(metric)) continue;
    for (std::string_view stat : kStatistics) {
      std::vector<double> xs, ys;
      for (const auto& rec : a.samples) {
        auto it = by_key.find(GroupKey(rec));
        if (it == by_key.end()) {
          throw InvalidArgument("sample '" + rec.sample_id +
                                "' is missing from the comparison report");
        }
        xs.push_back(Statistic(rec.metrics.at(metric), stat));
        ys.push_back(Statistic(it->second->metrics.at(metric), stat));
      }
      table[metric][std::string(stat)] =
          paired_significance(xs, ys, iterations, seed);
    }
  }
  return table;
}

std::vector<SpeakerFeature> speaker_features(
    std::span<const Utterance> dialogue) {
  std::vector<SpeakerFeature> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < dialogue.size(); ++i) {
    const auto& speaker = dialogue[i].speaker;
    auto [it, inserted] = index.emplace(speaker, out.size());
    if (inserted) out.push_back({speaker, i, 0});
    ++out[it->second].utterance_count;
  }
  return out;
}

std::vector<TrendRow> speaker_trends(std::span<const ChangeOneRecord> records,
                                     const TrendBins& bins) {
  std::vector<TrendRow> rows;
  AppendTrend("first_index", bins.first_index, records,
              &SpeakerFeature::first_index, rows);
  AppendTrend("utterance_count", bins.utterance_count, records,
              &SpeakerFeature::utterance_count, rows);
  return rows;
}

std::string serialize_variant_scores(const VariantScores& vs) {
  ordered_json j;
  j["sample_id"] = vs.sample_id;
  j["group"] = vs.group;
  j["metric"] = vs.metric_id;
  j["symmetric"] = vs.symmetric;
  j["variant_ids"] = vs.variant_ids;
  j["vs_reference"] = vs.vs_reference;
  j["pairwise"] = vs.pairwise;
  return j.dump();
}

std::vector<VariantScores> parse_variant_scores(std::string_view text,
                                                const std::string& source) {
  std::vector<VariantScores> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      VariantScores vs;
      vs.sample_id = j.at("sample_id").get<std::string>();
      vs.group = j.value("group", "");
      vs.metric_id = j.at("metric").get<std::string>();
      vs.symmetric = j.value("symmetric", true);
      vs.variant_ids = j.at("variant_ids").get<std::vector<std::string>>();
      vs.vs_reference = j.at("vs_reference").get<std::vector<double>>();
      vs.pairwise = j.at("pairwise").get<std::vector<std::vector<double>>>();
      out.push_back(std::move(vs));
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, "", e.what());
    }
  }
  return out;
}

std::string report_to_json(const SensitivityReport& report) {
  ordered_json j;
  ordered_json meta;
  meta["pool"] = report.meta.pool_label;
  meta["seed"] = report.meta.seed;
  meta["T"] = report.meta.variants_per_sample;
  meta["mode"] = report.meta.mode;
  meta["metrics"] = report.metric_ids;
  j["meta"] = meta;
  j["samples"] = report.samples.size();
  ordered_json macro = ordered_json::object();
  for (const auto& id : report.metric_ids) {
    macro[id] = StatsJson(report.macro.at(id));
  }
  j["macro"] = macro;
  ordered_json rows = ordered_json::array();
  for (const auto& rec : report.samples) {
    ordered_json r;
    r["sample_id"] = rec.sample_id;
    r["group"] = rec.group;
    ordered_json ms = ordered_json::object();
    for (const auto& id : report.metric_ids) ms[id] = StatsJson(rec.metrics.at(id));
    r["metrics"] = ms;
    rows.push_back(r);
  }
  j["per_sample"] = rows;
  if (report.significance) {
    ordered_json sig = ordered_json::object();
    for (const auto& [metric, stats] : *report.significance) {
      ordered_json s = ordered_json::object();
      for (std::string_view stat : kStatistics) {
        if (auto it = stats.find(std::string(stat)); it != stats.end()) {
          s[std::string(stat)] = it->second;
        }
      }
      sig[metric] = s;
    }
    j["significance"] = sig;
  }
  return j.dump(2) + "\n";
}

SensitivityReport report_from_json(std::string_view text,
                                   const std::string& source) {
  try {
    const json j = json::parse(text);
    SensitivityReport report;
    const json& meta = j.at("meta");
    report.meta.pool_label = meta.value("pool", "");
    report.meta.seed = meta.value("seed", std::uint64_t{0});
    report.meta.variants_per_sample = meta.value("T", std::size_t{0});
    report.meta.mode = meta.value("mode", "");
    report.metric_ids = meta.at("metrics").get<std::vector<std::string>>();
    for (const auto& id : report.metric_ids) {
      report.macro[id] = StatsFromJson(j.at("macro").at(id));
    }
    for (const auto& r : j.at("per_sample")) {
      SampleRecord rec;
      rec.sample_id = r.at("sample_id").get<std::string>();
      rec.group = r.value("group", "");
      for (const auto& [id, m] : r.at("metrics").items()) {
        rec.metrics[id] = StatsFromJson(m);
      }
      report.samples.push_back(std::move(rec));
    }
    if (j.contains("significance")) {
      report.significance =
          j.at("significance").get<SignificanceTable>();
    }
    return report;
  } catch (const json::exception& e) {
    throw ParseError(source, 0, "", e.what());
  }
}

std::string report_to_table(const SensitivityReport& report) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"metric", "mean", "S", "R", "D"});
  if (report.significance) {
    for (std::string_view stat : kStatistics) {
      cells.front().push_back("p(" + std::string(stat) + ")");
    }
  }
  for (const auto& id : report.metric_ids) {
    const auto& m = report.macro.at(id);
    std::vector<std::string> row = {id, Percent(m.mean), Percent(m.s),
                                    Percent(m.r), Percent(m.d)};
    if (report.significance) {
      const auto it = report.significance->find(id);
      for (std::string_view stat : kStatistics) {
        std::string cell = "-";
        if (it != report.significance->end()) {
          if (auto p = it->second.find(std::string(stat));
              p != it->second.end()) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", p->second);
            cell = buf;
          }
        }
        row.push_back(cell);
      }
    }
    cells.push_back(std::move(row));
  }

  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  out << "pool=" << report.meta.pool_label << " mode=" << report.meta.mode
      << " T=" << report.meta.variants_per_sample
      << " seed=" << report.meta.seed << " samples=" << report.samples.size()
      << "\n";
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[c]))
            << row[c];
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string report_to_csv(const SensitivityReport& report) {
  std::string out = internal::CsvLine(
      {"sample_id", "group", "metric", "mean", "S", "R", "D"});
  for (const auto& rec : report.samples) {
    for (const auto& id : report.metric_ids) {
      const auto& m = rec.metrics.at(id);
      out += internal::CsvLine({rec.sample_id, rec.group, id, Number(m.mean),
                                Number(m.s), Number(m.r), Number(m.d)});
    }
  }
  return out;
}

std::string trends_to_csv(std::span<const TrendRow> rows) {
  std::string out = internal::CsvLine({"feature", "bin", "mean", "count"});
  for (const auto& r : rows) {
    out += internal::CsvLine(
        {r.feature, r.bin, Number(r.mean), std::to_string(r.count)});
  }
  return out;
}

}  // namespace speaker_sense
