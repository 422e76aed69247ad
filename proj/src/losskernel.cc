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

#include "speaker_sense/losskernel.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "speaker_sense/errors.h"

namespace speaker_sense {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kAttentionSumTolerance = 1e-6;
constexpr std::uint32_t kMaxDims = 8;

std::size_t Product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d != 0 && n > std::numeric_limits<std::size_t>::max() / d) {
      throw InvalidArgument("tensor shape " + shape_string(shape) +
                            " overflows");
    }
    n *= d;
  }
  return n;
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t GetU32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i]))
         << (8 * i);
  }
  return v;
}

void PutF64(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double GetF64(std::string_view in, std::size_t pos) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i]))
            << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "", "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

bool IsJsonPath(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

// Nested arrays -> tensor; the nesting must be rectangular.
Tensor TensorFromNested(const json& j, const std::string& source) {
  std::vector<std::size_t> shape;
  const json* cursor = &j;
  while (cursor->is_array()) {
    shape.push_back(cursor->size());
    if (cursor->empty()) break;
    cursor = &(*cursor)[0];
  }
  if (shape.empty()) throw ParseError(source, 0, "values", "expected an array");
  std::vector<double> data;
  data.reserve(Product(shape));
  auto walk = [&](auto&& self, const json& node, std::size_t depth) -> void {
    if (depth == shape.size()) {
      if (!node.is_number()) {
        throw ParseError(source, 0, "values", "non-numeric entry");
      }
      data.push_back(node.get<double>());
      return;
    }
    if (!node.is_array() || node.size() != shape[depth]) {
      throw ParseError(source, 0, "values", "ragged nested array");
    }
    for (const auto& child : node) self(self, child, depth + 1);
  };
  walk(walk, j, 0);
  return Tensor(shape, std::move(data));
}

ordered_json NestedFromTensor(const Tensor& t) {
  auto build = [&](auto&& self, std::size_t depth,
                   std::size_t offset) -> ordered_json {
    ordered_json arr = ordered_json::array();
    std::size_t stride = 1;
    for (std::size_t d = depth + 1; d < t.ndim(); ++d) stride *= t.dim(d);
    for (std::size_t i = 0; i < t.dim(depth); ++i) {
      if (depth + 1 == t.ndim()) {
        arr.push_back(t.data()[offset + i]);
      } else {
        arr.push_back(self(self, depth + 1, offset + i * stride));
      }
    }
    return arr;
  };
  return t.ndim() == 0 ? ordered_json::array() : build(build, 0, 0);
}

std::vector<NameSpan> SpansFromJson(const json& j) {
  std::vector<NameSpan> spans;
  if (!j.contains("spans")) return spans;
  for (const auto& s : j.at("spans")) {
    NameSpan span;
    span.start = s.at("start").get<std::size_t>();
    span.end = s.at("end").get<std::size_t>();
    span.id = s.at("id").get<std::size_t>();
    spans.push_back(span);
  }
  return spans;
}

ordered_json SpansToJson(const std::vector<NameSpan>& spans) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : spans) {
    ordered_json o;
    o["start"] = s.start;
    o["end"] = s.end;
    o["id"] = s.id;
    arr.push_back(o);
  }
  return arr;
}

json ParseJsonFile(const std::string& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ParseError(path, 0, "", e.what());
  }
}

double PairwiseLoss(std::span<const Tensor> unified, const char* what) {
  const std::size_t k = unified.size();
  if (k < 2) {
    throw InvalidArgument(std::string(what) + " needs at least 2 variants, got " +
                          std::to_string(k));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) sum += mse(unified[i], unified[j]);
    }
  }
  return sum / static_cast<double>(k * (k - 1));
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(Product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != Product(shape_)) {
    throw InvalidArgument("tensor of shape " + shape_string(shape_) +
                          " needs " + std::to_string(Product(shape_)) +
                          " values, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  for (const auto& row : rows) {
    if (row.size() != cols) throw InvalidArgument("ragged matrix rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({rows.size(), cols}, std::move(data));
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void validate_attention(const CrossAttentionTensor& ca) {
  const Tensor& v = ca.values;
  if (v.ndim() != 3) {
    throw InvalidArgument("cross attention must be N x dout x din, got " +
                          shape_string(v.shape()));
  }
  for (std::size_t h = 0; h < v.dim(0); ++h) {
    for (std::size_t j = 0; j < v.dim(1); ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < v.dim(2); ++i) {
        const double x = v.at(h, j, i);
        if (!(x >= 0.0)) {
          throw InvalidArgument("negative or NaN attention at [" +
                                std::to_string(h) + "," + std::to_string(j) +
                                "," + std::to_string(i) + "]");
        }
        sum += x;
      }
      if (std::abs(sum - 1.0) > kAttentionSumTolerance) {
        throw InvalidArgument("attention at [" + std::to_string(h) + "," +
                              std::to_string(j) + ",:] sums to " +
                              std::to_string(sum));
      }
    }
  }
}

Tensor pool_attention(const CrossAttentionTensor& ca) {
  const Tensor& v = ca.values;
  if (v.ndim() != 3) {
    throw InvalidArgument("cross attention must be N x dout x din, got " +
                          shape_string(v.shape()));
  }
  const std::size_t n = v.dim(0), dout = v.dim(1), din = v.dim(2);
  if (dout == 0) throw InvalidArgument("cross attention has no output steps");
  Tensor out({n, din});
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t i = 0; i < din; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < dout; ++j) sum += v.at(h, j, i);
      out.at(h, i) = sum / static_cast<double>(dout);
    }
  }
  return out;
}

PooledAttention pool(const CrossAttentionTensor& ca) {
  return {pool_attention(ca), ca.name_spans, ca.truncated};
}

std::vector<Tensor> unify_attention(std::span<const PooledAttention> variants) {
  if (variants.empty()) throw InvalidArgument("no attention variants");
  const std::size_t heads = variants.front().values.ndim() == 2
                                ? variants.front().values.dim(0)
                                : 0;

  // Per variant: spans sorted by start, split into present and cut.
  struct Layout {
    std::vector<NameSpan> spans;  // present (possibly cut) spans
    std::set<std::size_t> cut;    // ids cut by truncation
    std::set<std::size_t> ids;    // ids present in any form
  };
  std::vector<Layout> layouts(variants.size());
  std::set<std::size_t> all_ids;

  for (std::size_t k = 0; k < variants.size(); ++k) {
    const auto& var = variants[k];
    if (var.values.ndim() != 2 || var.values.dim(0) != heads) {
      throw InvalidArgument("variant " + std::to_string(k) +
                            ": pooled attention has shape " +
                            shape_string(var.values.shape()) + ", expected " +
                            std::to_string(heads) + " x din");
    }
    const std::size_t din = var.values.dim(1);
    std::vector<NameSpan> spans = var.name_spans;
    std::sort(spans.begin(), spans.end(),
              [](const NameSpan& a, const NameSpan& b) { return a.start < b.start; });
    Layout& lay = layouts[k];
    for (std::size_t s = 0; s < spans.size(); ++s) {
      const NameSpan& sp = spans[s];
      if (sp.start >= sp.end) {
        throw InvalidArgument("variant " + std::to_string(k) + ": empty span [" +
                              std::to_string(sp.start) + "," +
                              std::to_string(sp.end) + ")");
      }
      if (s > 0 && sp.start < spans[s - 1].end) {
        throw InvalidArgument("variant " + std::to_string(k) +
                              ": overlapping name spans " +
                              std::to_string(spans[s - 1].id) + " and " +
                              std::to_string(sp.id));
      }
      if (!lay.ids.insert(sp.id).second) {
        throw InvalidArgument("variant " + std::to_string(k) +
                              ": duplicate occurrence id " +
                              std::to_string(sp.id));
      }
      if (sp.end > din) {
        if (!var.truncated) {
          throw InvalidArgument("variant " + std::to_string(k) + ": span " +
                                std::to_string(sp.id) + " ends past din=" +
                                std::to_string(din));
        }
        if (sp.start >= din) {
          lay.ids.erase(sp.id);
          continue;
        }
        lay.cut.insert(sp.id);
        lay.spans.push_back({sp.start, din, sp.id});
        continue;
      }
      lay.spans.push_back(sp);
    }
    all_ids.insert(lay.ids.begin(), lay.ids.end());
  }

  std::set<std::size_t> masked;
  for (std::size_t k = 0; k < variants.size(); ++k) {
    const Layout& lay = layouts[k];
    for (std::size_t id : all_ids) {
      if (lay.ids.contains(id)) continue;
      if (!variants[k].truncated) {
        throw InvalidArgument("variant " + std::to_string(k) +
                              " lacks name occurrence " + std::to_string(id));
      }
      masked.insert(id);
    }
    masked.insert(lay.cut.begin(), lay.cut.end());
  }

  std::vector<std::vector<std::vector<double>>> columns(variants.size());
  std::size_t din_u = 0;
  for (std::size_t k = 0; k < variants.size(); ++k) {
    const Tensor& v = variants[k].values;
    const std::size_t din = v.dim(1);
    auto& cols = columns[k];
    std::size_t next_span = 0;
    const auto& spans = layouts[k].spans;
    for (std::size_t i = 0; i < din;) {
      std::vector<double> col(heads, 0.0);
      if (next_span < spans.size() && spans[next_span].start == i) {
        const NameSpan& sp = spans[next_span++];
        if (!masked.contains(sp.id)) {
          for (std::size_t h = 0; h < heads; ++h) {
            for (std::size_t x = sp.start; x < sp.end; ++x) col[h] += v.at(h, x);
          }
        }
        i = sp.end;
      } else {
        for (std::size_t h = 0; h < heads; ++h) col[h] = v.at(h, i);
        ++i;
      }
      cols.push_back(std::move(col));
    }
    din_u = std::max(din_u, cols.size());
  }

  std::vector<Tensor> out;
  out.reserve(variants.size());
  for (const auto& cols : columns) {
    Tensor t({heads, din_u});
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (std::size_t h = 0; h < heads; ++h) t.at(h, c) = cols[c][h];
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Tensor> unify_hidden(std::span<const DecoderHiddenTensor> variants) {
  if (variants.empty()) throw InvalidArgument("no hidden-state variants");
  std::vector<std::vector<std::size_t>> kept(variants.size());
  std::size_t hidden = 0;
  std::size_t dout_u = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < variants.size(); ++k) {
    const auto& var = variants[k];
    if (var.values.ndim() != 2) {
      throw InvalidArgument("variant " + std::to_string(k) +
                            ": hidden states must be H x dout, got " +
                            shape_string(var.values.shape()));
    }
    if (k == 0) hidden = var.values.dim(0);
    if (var.values.dim(0) != hidden) {
      throw InvalidArgument("variant " + std::to_string(k) + " has H=" +
                            std::to_string(var.values.dim(0)) + ", expected " +
                            std::to_string(hidden));
    }
    const std::size_t dout = var.values.dim(1);
    if (var.name_steps.size() != dout) {
      throw InvalidArgument("variant " + std::to_string(k) + " has " +
                            std::to_string(var.name_steps.size()) +
                            " step flags for dout=" + std::to_string(dout));
    }
    for (std::size_t j = 0; j < dout; ++j) {
      if (!var.name_steps[j]) kept[k].push_back(j);
    }
    dout_u = std::min(dout_u, kept[k].size());
  }
  if (dout_u == 0) {
    throw InvalidArgument("no comparable decoder steps remain after Del/Trunc");
  }
  std::vector<Tensor> out;
  for (std::size_t k = 0; k < variants.size(); ++k) {
    Tensor t({hidden, dout_u});
    for (std::size_t h = 0; h < hidden; ++h) {
      for (std::size_t j = 0; j < dout_u; ++j) {
        t.at(h, j) = variants[k].values.at(h, kept[k][j]);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

double mse(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw InvalidArgument("mse shape mismatch: " + shape_string(a.shape()) +
                          " vs " + shape_string(b.shape()));
  }
  if (a.size() == 0) throw InvalidArgument("mse of empty tensors");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double cross_attention_loss(std::span<const Tensor> unified) {
  return PairwiseLoss(unified, "cross-attention loss");
}

double decoder_hidden_loss(std::span<const Tensor> unified) {
  return PairwiseLoss(unified, "decoder hidden-state loss");
}

double total_loss(double l_gen, double l_ca, double l_dh,
                  const LossWeights& weights) {
  for (double x : {l_gen, l_ca, l_dh, weights.alpha, weights.beta}) {
    if (!std::isfinite(x)) throw InvalidArgument("non-finite loss input");
  }
  if (weights.alpha < 0.0 || weights.beta < 0.0) {
    throw InvalidArgument("loss weights must be non-negative");
  }
  return l_gen + weights.alpha * l_ca + weights.beta * l_dh;
}

std::string encode_tensor(const Tensor& t) {
  std::string out;
  out.reserve(4 + 4 * t.ndim() + 8 * t.size());
  PutU32(out, static_cast<std::uint32_t>(t.ndim()));
  for (std::size_t d : t.shape()) PutU32(out, static_cast<std::uint32_t>(d));
  for (double x : t.data()) PutF64(out, x);
  return out;
}

Tensor decode_tensor(std::string_view bytes, const std::string& source) {
  if (bytes.size() < 4) throw ParseError(source, 0, "ndim", "truncated header");
  const std::uint32_t ndim = GetU32(bytes, 0);
  if (ndim == 0 || ndim > kMaxDims) {
    throw ParseError(source, 0, "ndim",
                     "unsupported rank " + std::to_string(ndim));
  }
  if (bytes.size() < 4 + 4 * static_cast<std::size_t>(ndim)) {
    throw ParseError(source, 0, "dims", "truncated header");
  }
  std::vector<std::size_t> shape(ndim);
  for (std::uint32_t i = 0; i < ndim; ++i) shape[i] = GetU32(bytes, 4 + 4 * i);
  const std::size_t header = 4 + 4 * static_cast<std::size_t>(ndim);
  std::size_t count;
  try {
    count = Product(shape);
  } catch (const InvalidArgument& e) {
    throw ParseError(source, 0, "dims", e.what());
  }
  if ((bytes.size() - header) / 8 != count || (bytes.size() - header) % 8 != 0) {
    throw ParseError(source, 0, "data",
                     "expected " + std::to_string(count) + " values for shape " +
                         shape_string(shape) + ", file holds " +
                         std::to_string(bytes.size() - header) + " bytes");
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = GetF64(bytes, header + 8 * i);
  return Tensor(std::move(shape), std::move(data));
}

void write_tensor(const Tensor& t, const std::string& path) {
  WriteFile(path, encode_tensor(t));
}

Tensor read_tensor(const std::string& path) {
  return decode_tensor(ReadFile(path), path);
}

void write_cross_attention(const CrossAttentionTensor& ca,
                           const std::string& path) {
  ordered_json meta;
  if (IsJsonPath(path)) meta["values"] = NestedFromTensor(ca.values);
  meta["spans"] = SpansToJson(ca.name_spans);
  meta["truncated"] = ca.truncated;
  if (IsJsonPath(path)) {
    WriteFile(path, meta.dump() + "\n");
  } else {
    write_tensor(ca.values, path);
    WriteFile(path + ".json", meta.dump() + "\n");
  }
}

CrossAttentionTensor read_cross_attention(const std::string& path) {
  CrossAttentionTensor ca;
  json meta;
  std::string meta_source = path;
  if (IsJsonPath(path)) {
    meta = ParseJsonFile(path);
    if (!meta.contains("values")) {
      throw ParseError(path, 0, "values", "missing");
    }
    ca.values = TensorFromNested(meta.at("values"), path);
  } else {
    ca.values = read_tensor(path);
    meta_source = path + ".json";
    meta = ParseJsonFile(meta_source);
  }
  try {
    ca.name_spans = SpansFromJson(meta);
    ca.truncated = meta.value("truncated", false);
  } catch (const json::exception& e) {
    throw ParseError(meta_source, 0, "spans", e.what());
  }
  if (ca.values.ndim() != 3) {
    throw ParseError(path, 0, "values",
                     "cross attention must have rank 3, got shape " +
                         shape_string(ca.values.shape()));
  }
  return ca;
}

void write_decoder_hidden(const DecoderHiddenTensor& dh,
                          const std::string& path) {
  ordered_json meta;
  if (IsJsonPath(path)) meta["values"] = NestedFromTensor(dh.values);
  meta["name_steps"] = dh.name_steps;
  if (IsJsonPath(path)) {
    WriteFile(path, meta.dump() + "\n");
  } else {
    write_tensor(dh.values, path);
    WriteFile(path + ".json", meta.dump() + "\n");
  }
}

DecoderHiddenTensor read_decoder_hidden(const std::string& path) {
  DecoderHiddenTensor dh;
  json meta;
  std::string meta_source = path;
  if (IsJsonPath(path)) {
    meta = ParseJsonFile(path);
    if (!meta.contains("values")) {
      throw ParseError(path, 0, "values", "missing");
    }
    dh.values = TensorFromNested(meta.at("values"), path);
  } else {
    dh.values = read_tensor(path);
    meta_source = path + ".json";
    meta = ParseJsonFile(meta_source);
  }
  if (dh.values.ndim() != 2) {
    throw ParseError(path, 0, "values",
                     "hidden states must have rank 2, got shape " +
                         shape_string(dh.values.shape()));
  }
  try {
    if (meta.contains("name_steps")) {
      dh.name_steps = meta.at("name_steps").get<std::vector<bool>>();
    } else {
      dh.name_steps.assign(dh.values.dim(1), false);
    }
  } catch (const json::exception& e) {
    throw ParseError(meta_source, 0, "name_steps", e.what());
  }
  return dh;
}

}  // namespace speaker_sense
