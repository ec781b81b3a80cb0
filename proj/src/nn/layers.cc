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

#include "dystts/nn/layers.h"

#include <cmath>

namespace dystts::nn {

template <typename T>
Var<T> ParameterSet<T>::Add(const std::string& name, Tensor<T> init) {
  Require(Find(name) == nullptr, "duplicate parameter name '" + name + "'");
  Var<T> v = Var<T>::Leaf(std::move(init));
  params_.push_back({name, v});
  return v;
}

template <typename T>
std::size_t ParameterSet<T>::NumScalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.var.value().size();
  return n;
}

template <typename T>
void ParameterSet<T>::ZeroGrad() {
  for (auto& p : params_) p.var.grad().Fill(T(0));
}

template <typename T>
Parameter<T>* ParameterSet<T>::Find(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

template <typename T>
Tensor<T> XavierUniform(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Tensor<T> t(std::move(shape));
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.values()) v = static_cast<T>(rng.Uniform(-limit, limit));
  return t;
}

template <typename T>
Tensor<T> NormalInit(Shape shape, double stddev, Rng& rng) {
  Tensor<T> t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<T>(stddev * rng.Normal());
  return t;
}

template <typename T>
Linear<T>::Linear(ParameterSet<T>& ps, const std::string& name, std::size_t in, std::size_t out,
                  Rng& rng, bool bias)
    : in_(in), out_(out) {
  weight_ = ps.Add(name + ".weight", XavierUniform<T>({in, out}, in, out, rng));
  if (bias) bias_ = ps.Add(name + ".bias", Tensor<T>({out}));
}

template <typename T>
Var<T> Linear<T>::operator()(const Var<T>& x) const {
  Var<T> y = MatMul(x, weight_);
  return bias_.defined() ? AddBias(y, bias_) : y;
}

template <typename T>
Conv1dLayer<T>::Conv1dLayer(ParameterSet<T>& ps, const std::string& name, std::size_t in,
                            std::size_t out, std::size_t kernel, Rng& rng)
    : kernel_(kernel) {
  weight_ = ps.Add(name + ".weight",
                   XavierUniform<T>({kernel * in, out}, kernel * in, kernel * out, rng));
  bias_ = ps.Add(name + ".bias", Tensor<T>({out}));
}

template <typename T>
Var<T> Conv1dLayer<T>::operator()(const Var<T>& x, const SeqLayout& layout) const {
  return Conv1d(x, weight_, bias_, kernel_, layout);
}

template <typename T>
LayerNormLayer<T>::LayerNormLayer(ParameterSet<T>& ps, const std::string& name, std::size_t dim) {
  gamma_ = ps.Add(name + ".gamma", Tensor<T>({dim}, T(1)));
  beta_ = ps.Add(name + ".beta", Tensor<T>({dim}));
}

template <typename T>
Var<T> LayerNormLayer<T>::operator()(const Var<T>& x) const {
  return LayerNorm(x, gamma_, beta_);
}

template <typename T>
Embedding<T>::Embedding(ParameterSet<T>& ps, const std::string& name, std::size_t count,
                        std::size_t dim, double stddev, Rng& rng) {
  table_ = ps.Add(name, NormalInit<T>({count, dim}, stddev, rng));
}

template <typename T>
Var<T> Embedding<T>::operator()(std::span<const std::ptrdiff_t> ids) const {
  return GatherRows(table_, ids);
}

template <typename T>
Tensor<T> SinusoidPositions(std::size_t length, std::size_t dim) {
  Tensor<T> pe = Tensor<T>::Matrix2D(length, dim);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double rate = std::pow(10000.0, -2.0 * static_cast<double>(i / 2) / dim);
      const double angle = static_cast<double>(pos) * rate;
      pe.at(pos, i) = static_cast<T>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

template <typename T>
Tensor<T> BatchedPositions(const SeqLayout& layout, std::size_t dim) {
  const Tensor<T> pe = SinusoidPositions<T>(layout.max_len, dim);
  Tensor<T> out = Tensor<T>::Matrix2D(layout.rows(), dim);
  for (std::size_t b = 0; b < layout.batch; ++b) {
    for (std::size_t t = 0; t < layout.lengths[b]; ++t) {
      std::copy_n(pe.data() + t * dim, dim, out.data() + (b * layout.max_len + t) * dim);
    }
  }
  return out;
}

#define DYSTTS_INSTANTIATE_LAYERS(T)                                                   \
  template class ParameterSet<T>;                                                      \
  template class Linear<T>;                                                            \
  template class Conv1dLayer<T>;                                                       \
  template class LayerNormLayer<T>;                                                    \
  template class Embedding<T>;                                                         \
  template Tensor<T> XavierUniform<T>(Shape, std::size_t, std::size_t, Rng&);          \
  template Tensor<T> NormalInit<T>(Shape, double, Rng&);                               \
  template Tensor<T> SinusoidPositions<T>(std::size_t, std::size_t);                   \
  template Tensor<T> BatchedPositions<T>(const SeqLayout&, std::size_t);

DYSTTS_INSTANTIATE_LAYERS(float)
DYSTTS_INSTANTIATE_LAYERS(double)
DYSTTS_INSTANTIATE_LAYERS(long double)

}  // namespace dystts::nn
