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

// Python bindings. Samples cross the boundary as canonical JSON lines;
// tensors as nested lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "speaker_sense/corpus.h"
#include "speaker_sense/errors.h"
#include "speaker_sense/losskernel.h"
#include "speaker_sense/metrics.h"
#include "speaker_sense/namepool.h"
#include "speaker_sense/perturb.h"
#include "speaker_sense/random.h"
#include "speaker_sense/sensitivity.h"

namespace py = pybind11;

namespace speaker_sense {
namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

NameMapping MappingFrom(const Pairs& pairs) {
  NameMapping m;
  m.pairs = pairs;
  return m;
}

Tensor MatrixFrom(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> data;
  for (const auto& r : rows) {
    if (r.size() != cols) throw InvalidArgument("ragged matrix");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(data));
}

Tensor Cube(const std::vector<std::vector<std::vector<double>>>& v) {
  const std::size_t n = v.size();
  const std::size_t dout = n ? v[0].size() : 0;
  const std::size_t din = dout ? v[0][0].size() : 0;
  std::vector<double> data;
  for (const auto& m : v) {
    if (m.size() != dout) throw InvalidArgument("ragged attention tensor");
    for (const auto& r : m) {
      if (r.size() != din) throw InvalidArgument("ragged attention tensor");
      data.insert(data.end(), r.begin(), r.end());
    }
  }
  return Tensor({n, dout, din}, std::move(data));
}

std::vector<std::string> Perturb(const std::string& sample_json,
                                 const std::string& pool_path, std::size_t t,
                                 std::uint64_t seed, const std::string& mode,
                                 bool gender_consistent) {
  const Sample sample = parse_sample(sample_json);
  PerturbOptions opts;
  opts.gender_consistent = gender_consistent;
  const PerturbationMode m = parse_mode(mode);
  std::vector<PerturbationSet> sets;
  if (m == PerturbationMode::kIdCodes) {
    sets.push_back(make_test_variants(sample, NamePool(), 1, seed, m));
  } else {
    const NamePool pool = load_pool(pool_path);
    if (m == PerturbationMode::kChangeAll) {
      sets.push_back(make_test_variants(sample, pool, t, seed, m, opts));
    } else if (m == PerturbationMode::kChangeOne) {
      sets = make_single_speaker_variants(sample, pool, t, seed, opts);
    } else {
      sets.push_back(make_augmented_set(sample, pool, t, seed, opts));
    }
  }
  std::vector<std::string> out;
  for (const auto& set : sets) {
    for (const auto& v : set.variants) out.push_back(serialize_variant(set, v));
  }
  return out;
}

py::dict Sensitivity(const std::string& metric_name,
                     const std::vector<std::string>& outputs,
                     const std::string& reference) {
  const auto metric = make_metric(metric_name);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < outputs.size(); ++i) ids.push_back("t" + std::to_string(i));
  const auto vs = score_variants("", "", *metric, ids, outputs, reference);
  const auto rec = sensitivity_record(std::vector<VariantScores>{vs});
  const auto& m = rec.metrics.at(metric->id());
  py::dict d;
  d["mean"] = m.mean;
  d["S"] = m.s;
  d["R"] = m.r;
  d["D"] = m.d;
  return d;
}

}  // namespace
}  // namespace speaker_sense

PYBIND11_MODULE(_core, m) {
  using namespace speaker_sense;
  m.doc() = "Speaker-name sensitivity toolkit";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("tokenize", [](const std::string& text, bool stem) {
    TokenizerConfig c;
    c.stem = stem;
    return tokenize(text, c);
  }, py::arg("text"), py::arg("stem") = false);
  m.def("rouge_n", [](const std::string& c, const std::string& r, std::size_t n) {
    return rouge_n_f1(c, r, n);
  }, py::arg("candidate"), py::arg("reference"), py::arg("n") = 2);
  m.def("rouge_l", [](const std::string& c, const std::string& r) {
    return rouge_l_f1(c, r);
  }, py::arg("candidate"), py::arg("reference"));
  m.def("bleu", [](const std::string& c, const std::string& r) { return bleu(c, r); },
        py::arg("candidate"), py::arg("reference"));
  m.def("score", [](const std::string& metric, const std::string& c,
                    const std::string& r) { return make_metric(metric)->score(c, r); },
        py::arg("metric"), py::arg("candidate"), py::arg("reference"));

  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("sample_id"),
        py::arg("index"), py::arg("stream") = 0);
  m.def("perturb", &Perturb, py::arg("sample_json"), py::arg("pool_path") = "",
        py::arg("T") = 5, py::arg("seed") = 0, py::arg("mode") = "change-all",
        py::arg("gender_consistent") = false,
        "Variants of one sample as JSON lines.");
  m.def("replace_names", [](const std::string& sample_json, const Pairs& pairs) {
    return serialize_sample(replace_names(parse_sample(sample_json), MappingFrom(pairs)));
  }, py::arg("sample_json"), py::arg("pairs"));
  m.def("back_substitute", [](const std::string& text, const Pairs& pairs) {
    return back_substitute(text, MappingFrom(pairs));
  }, py::arg("text"), py::arg("pairs"));
  m.def("detect_mentions", [](const std::string& sample_json,
                              const std::vector<std::string>& lexicon) {
    const auto found = detect_mentions(parse_sample(sample_json), lexicon);
    return std::vector<std::string>(found.begin(), found.end());
  }, py::arg("sample_json"), py::arg("lexicon"));

  m.def("sensitivity", &Sensitivity, py::arg("metric"), py::arg("outputs"),
        py::arg("reference"),
        "mean, S, R and D of one sample's back-substituted outputs.");
  m.def("paired_significance", [](const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  std::size_t iterations, std::uint64_t seed) {
    return paired_significance(a, b, iterations, seed);
  }, py::arg("a"), py::arg("b"), py::arg("iterations") = 10000, py::arg("seed") = 0);

  m.def("uniqueness_score", &uniqueness_score, py::arg("rank_exact"),
        py::arg("rank_ner"));
  m.def("popularity_groups", [](const std::string& pool_path, std::size_t g,
                                const std::vector<std::string>& frequent) {
    const auto groups = build_popularity_groups(load_pool(pool_path), g, frequent);
    std::map<std::string, std::string> out;
    for (const auto& [name, grp] : groups.assignment) {
      out[name] = std::string(popularity_group_name(grp));
    }
    return out;
  }, py::arg("pool_path"), py::arg("group_size"),
     py::arg("frequent") = std::vector<std::string>{});

  m.def("cross_attention_loss",
        [](const std::vector<std::vector<std::vector<std::vector<double>>>>& variants) {
          std::vector<PooledAttention> pooled;
          for (const auto& v : variants) {
            CrossAttentionTensor ca;
            ca.values = Cube(v);
            pooled.push_back(pool(ca));
          }
          return cross_attention_loss(unify_attention(pooled));
        },
        py::arg("variants"), "L_ca over K attention tensors (N x dout x din).");
  m.def("decoder_hidden_loss",
        [](const std::vector<std::vector<std::vector<double>>>& variants) {
          std::vector<DecoderHiddenTensor> dh;
          for (const auto& v : variants) {
            DecoderHiddenTensor t;
            t.values = MatrixFrom(v);
            t.name_steps.assign(t.values.dim(1), false);
            dh.push_back(std::move(t));
          }
          return decoder_hidden_loss(unify_hidden(dh));
        },
        py::arg("variants"), "L_dh over K hidden-state matrices (H x dout).");
  m.def("total_loss", [](double l_gen, double l_ca, double l_dh, double alpha,
                         double beta) {
    return total_loss(l_gen, l_ca, l_dh, {alpha, beta});
  }, py::arg("l_gen"), py::arg("l_ca"), py::arg("l_dh"), py::arg("alpha") = 1.0,
     py::arg("beta") = 10.0);
}
