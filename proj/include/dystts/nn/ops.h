// Copyright 2026 The dystts Authors.
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

#ifndef DYSTTS_NN_OPS_H_
#define DYSTTS_NN_OPS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dystts/nn/tensor.h"
#include "dystts/rng.h"

namespace dystts::nn {

// A batch of variable-length sequences stored as batch * max_len rows; row
// b * max_len + t is position t of sequence b. Positions >= lengths[b] are
// padding.
struct SeqLayout {
  std::size_t batch = 0;
  std::size_t max_len = 0;
  std::vector<std::size_t> lengths;

  static SeqLayout Single(std::size_t length) { return {1, length, {length}}; }
  static SeqLayout FromLengths(std::vector<std::size_t> lengths);

  std::size_t rows() const { return batch * max_len; }
  bool Valid(std::size_t row) const { return row % max_len < lengths[row / max_len]; }
  std::size_t ValidCount() const;
  // 1 for valid rows, 0 for padding.
  template <typename T>
  std::vector<T> RowMask() const {
    std::vector<T> mask(rows(), T(0));
    for (std::size_t r = 0; r < rows(); ++r) mask[r] = Valid(r) ? T(1) : T(0);
    return mask;
  }
};

// Matrix product [m,k] x [k,n].
template <typename T> Var<T> MatMul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> Add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> Sub(const Var<T>& a, const Var<T>& b);
// Elementwise product.
template <typename T> Var<T> Mul(const Var<T>& a, const Var<T>& b);
// x [N,C] + bias [C] broadcast over rows. The only broadcast the core supports.
template <typename T> Var<T> AddBias(const Var<T>& x, const Var<T>& bias);
template <typename T> Var<T> Scale(const Var<T>& x, T factor);
// Scales row r of x by the constant weights[r] (masks, coefficients).
template <typename T> Var<T> MulRows(const Var<T>& x, std::span<const T> weights);
template <typename T> Var<T> Relu(const Var<T>& x);

// While alive, every Relu on this thread folds the sign pattern of its input
// into a fingerprint. Two evaluations with equal fingerprints used the same
// linear piece of every Relu.
class ActivationPatternTrace {
 public:
  ActivationPatternTrace();
  ~ActivationPatternTrace();
  ActivationPatternTrace(const ActivationPatternTrace&) = delete;
  ActivationPatternTrace& operator=(const ActivationPatternTrace&) = delete;

  static ActivationPatternTrace* Current();
  void Fold(std::uint64_t bits) { hash_ = Mix64(hash_ ^ bits); }
  std::uint64_t fingerprint() const { return hash_; }
  void Reset() { hash_ = 0; }

 private:
  std::uint64_t hash_ = 0;
  ActivationPatternTrace* previous_;
};
template <typename T> Var<T> SoftmaxRows(const Var<T>& x);
// Normalizes each row over the last axis, then applies gamma/beta [C].
template <typename T>
Var<T> LayerNorm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps = T(1e-5));
// Same-padded, stride-1 convolution over each sequence in `layout`.
// weight is [kernel * in, out] with row k * in + c; bias is [out].
template <typename T>
Var<T> Conv1d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, std::size_t kernel,
              const SeqLayout& layout);
// out[i] = table[indices[i]], or a zero row where indices[i] < 0. Serves as
// embedding lookup and as the length regulator's expansion.
template <typename T>
Var<T> GatherRows(const Var<T>& table, std::span<const std::ptrdiff_t> indices);
// Inverted dropout. Identity when !training or rate == 0.
template <typename T> Var<T> Dropout(const Var<T>& x, T rate, Rng& rng, bool training);
// softmax(q k^T / sqrt(d) + mask) v for single matrices; mask is [Tq, Tk]
// with -inf at excluded positions.
template <typename T>
Var<T> ScaledDotAttention(const Var<T>& q, const Var<T>& k, const Var<T>& v,
                          const Tensor<T>& additive_mask);
// Multi-head self-attention core over a padded batch: heads split the
// columns of q/k/v; padded keys are excluded.
template <typename T>
Var<T> MultiHeadAttention(const Var<T>& q, const Var<T>& k, const Var<T>& v,
                          std::size_t n_heads, const SeqLayout& layout);
// Mean over the valid rows of each sequence -> [batch, C].
template <typename T> Var<T> MeanPool(const Var<T>& x, const SeqLayout& layout);
// Sum of all elements -> [1].
template <typename T> Var<T> Sum(const Var<T>& x);
// sum_r w_r sum_c (pred - target)^2 / (sum_r w_r * C) -> [1].
template <typename T>
Var<T> MaskedMse(const Var<T>& pred, const Tensor<T>& target, std::span<const T> row_weights);
// Mean negative log-likelihood of labels under row-softmax of logits -> [1].
template <typename T> Var<T> CrossEntropy(const Var<T>& logits, std::span<const int> labels);

}  // namespace dystts::nn

#endif  // DYSTTS_NN_OPS_H_
