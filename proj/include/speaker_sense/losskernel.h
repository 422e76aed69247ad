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

// Forward values of the name-insensitivity losses over recorded tensors:
// cross-attention pooling and Sum/Pad unification, decoder hidden-state
// Del/Trunc unification, the pairwise MSE losses, and their weighted total.
//
// Tensor file layout (little-endian):
//   u32 ndim, u32 dims[ndim], f64 values[prod(dims)] in row-major order.
// Spans and step flags live in a JSON sidecar at "<path>.json":
//   cross attention:  {"spans": [{"start", "end", "id"}...], "truncated": bool}
//   decoder hidden:   {"name_steps": [bool...]}
// Files ending in ".json" are read as the debug format instead: the same
// object with an extra "values" key holding nested arrays.

#ifndef SPEAKER_SENSE_LOSSKERNEL_H_
#define SPEAKER_SENSE_LOSSKERNEL_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speaker_sense {

// Dense row-major tensor of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  // 1-D and 2-D convenience constructors.
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

// Token range [start, end) of one speaker-name occurrence in the input.
// Occurrence ids pair the same occurrence across variants.
struct NameSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t id = 0;

  bool operator==(const NameSpan&) const = default;
};

struct CrossAttentionTensor {
  Tensor values;  // N heads x dout steps x din tokens
  std::vector<NameSpan> name_spans;
  // Input was cut; spans past or across the end are absent in this variant.
  bool truncated = false;
};

struct DecoderHiddenTensor {
  Tensor values;  // H hidden x dout steps
  // True where the predicted token belongs to a speaker name.
  std::vector<bool> name_steps;
};

struct LossWeights {
  double alpha = 1.0;
  double beta = 10.0;
};

// Throws InvalidArgument when a slice values[h, j, :] has a negative entry or
// does not sum to 1 within 1e-6.
void validate_attention(const CrossAttentionTensor& ca);

// N x din, averaged over output steps. Requires dout >= 1.
Tensor pool_attention(const CrossAttentionTensor& ca);

struct PooledAttention {
  Tensor values;  // N x din
  std::vector<NameSpan> name_spans;
  bool truncated = false;
};

PooledAttention pool(const CrossAttentionTensor& ca);

// Sum: each name span becomes one column holding the span sum. Pad: all
// variants are zero-padded at the end to the longest collapsed length.
// Occurrences missing from a truncated variant are zero-masked everywhere.
std::vector<Tensor> unify_attention(std::span<const PooledAttention> variants);

// Del: flagged steps are dropped. Trunc: every variant is cut to the shortest
// remaining length, which must be positive.
std::vector<Tensor> unify_hidden(std::span<const DecoderHiddenTensor> variants);

double mse(const Tensor& a, const Tensor& b);

// Mean of mse over the K(K-1) ordered pairs. Requires K >= 2.
double cross_attention_loss(std::span<const Tensor> unified);
double decoder_hidden_loss(std::span<const Tensor> unified);

// l_gen + alpha * l_ca + beta * l_dh. Throws on non-finite input or negative
// weights.
double total_loss(double l_gen, double l_ca, double l_dh,
                  const LossWeights& weights = {});

// Tensor I/O.
std::string encode_tensor(const Tensor& t);
Tensor decode_tensor(std::string_view bytes, const std::string& source);
void write_tensor(const Tensor& t, const std::string& path);
Tensor read_tensor(const std::string& path);

void write_cross_attention(const CrossAttentionTensor& ca,
                           const std::string& path);
CrossAttentionTensor read_cross_attention(const std::string& path);
void write_decoder_hidden(const DecoderHiddenTensor& dh,
                          const std::string& path);
DecoderHiddenTensor read_decoder_hidden(const std::string& path);

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_LOSSKERNEL_H_
