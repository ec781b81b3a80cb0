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

#ifndef DYSTTS_NN_LAYERS_H_
#define DYSTTS_NN_LAYERS_H_

#include <string>
#include <vector>

#include "dystts/nn/ops.h"
#include "dystts/rng.h"

namespace dystts::nn {

template <typename T>
struct Parameter {
  std::string name;
  Var<T> var;
};

// Ordered, uniquely named collection of trainable leaves.
template <typename T>
class ParameterSet {
 public:
  Var<T> Add(const std::string& name, Tensor<T> init);

  std::vector<Parameter<T>>& params() { return params_; }
  const std::vector<Parameter<T>>& params() const { return params_; }
  std::size_t NumScalars() const;
  void ZeroGrad();
  Parameter<T>* Find(const std::string& name);

 private:
  std::vector<Parameter<T>> params_;
};

// Uniform(-limit, limit) with limit = sqrt(6 / (fan_in + fan_out)).
template <typename T>
Tensor<T> XavierUniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);
template <typename T>
Tensor<T> NormalInit(Shape shape, double stddev, Rng& rng);

template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet<T>& ps, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
         bool bias = true);
  Var<T> operator()(const Var<T>& x) const;

  std::size_t in() const { return in_; }
  std::size_t out() const { return out_; }

 private:
  std::size_t in_ = 0, out_ = 0;
  Var<T> weight_, bias_;
};

template <typename T>
class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(ParameterSet<T>& ps, const std::string& name, std::size_t in, std::size_t out,
              std::size_t kernel, Rng& rng);
  Var<T> operator()(const Var<T>& x, const SeqLayout& layout) const;

 private:
  std::size_t kernel_ = 1;
  Var<T> weight_, bias_;
};

template <typename T>
class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  LayerNormLayer(ParameterSet<T>& ps, const std::string& name, std::size_t dim);
  Var<T> operator()(const Var<T>& x) const;

 private:
  Var<T> gamma_, beta_;
};

template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(ParameterSet<T>& ps, const std::string& name, std::size_t count, std::size_t dim,
            double stddev, Rng& rng);
  // Row lookup; negative ids produce zero rows.
  Var<T> operator()(std::span<const std::ptrdiff_t> ids) const;
  const Var<T>& table() const { return table_; }
  Var<T>& table() { return table_; }
  std::size_t count() const { return table_.rows(); }

 private:
  Var<T> table_;
};

// Sinusoidal position encoding, [length, dim].
template <typename T>
Tensor<T> SinusoidPositions(std::size_t length, std::size_t dim);

// Position encoding laid out over a padded batch (zero on padding rows).
template <typename T>
Tensor<T> BatchedPositions(const SeqLayout& layout, std::size_t dim);

}  // namespace dystts::nn

#endif  // DYSTTS_NN_LAYERS_H_
