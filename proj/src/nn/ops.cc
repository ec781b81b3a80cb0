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

#include "dystts/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dystts::nn {
namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void CheckShape(bool ok, const char* op, const Shape& a, const Shape& b) {
  if (!ok) {
    Fail(ErrorCode::kInvalidArgument,
         std::string(op) + ": shape mismatch " + ShapeString(a) + " vs " + ShapeString(b));
  }
}

template <typename T>
void Accumulate(Node<T>* n, const Tensor<T>& g) {
  if (!n->requires_grad) return;
  auto& dst = n->Grad();
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

// Softmax of each row in place; rows entirely at -inf are rejected.
template <typename T>
void SoftmaxInPlace(Eigen::Ref<Mat<T>> s) {
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const T mx = s.row(r).maxCoeff();
    if (!std::isfinite(mx)) {
      Fail(ErrorCode::kInvalidArgument, "softmax: row has no finite entries");
    }
    T sum = 0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      const T e = std::exp(s(r, c) - mx);
      s(r, c) = e;
      sum += e;
    }
    s.row(r) /= sum;
  }
}

// Gradient of softmax rows: dS = P o (dP - rowsum(dP o P)).
template <typename T>
Mat<T> SoftmaxBackward(const Mat<T>& p, const Mat<T>& dp) {
  Mat<T> ds = p.cwiseProduct(dp);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const T dot = ds.row(r).sum();
    ds.row(r) -= p.row(r) * dot;
  }
  return ds;
}

}  // namespace

std::size_t SeqLayout::ValidCount() const {
  std::size_t n = 0;
  for (auto l : lengths) n += l;
  return n;
}

SeqLayout SeqLayout::FromLengths(std::vector<std::size_t> lengths) {
  SeqLayout layout;
  layout.batch = lengths.size();
  layout.max_len = lengths.empty() ? 0 : *std::max_element(lengths.begin(), lengths.end());
  layout.lengths = std::move(lengths);
  return layout;
}

bool& GradEnabledFlag() {
  thread_local bool enabled = true;
  return enabled;
}
bool GradEnabled() { return GradEnabledFlag(); }
void SetGradEnabled(bool enabled) { GradEnabledFlag() = enabled; }

template <typename T>
Var<T> MatMul(const Var<T>& a, const Var<T>& b) {
  CheckShape(a.value().rank() == 2 && b.value().rank() == 2 && a.cols() == b.rows(), "matmul",
             a.shape(), b.shape());
  Tensor<T> out = Tensor<T>::Matrix2D(a.rows(), b.cols());
  out.map().noalias() = a.value().map() * b.value().map();
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return MakeResult<T>(std::move(out), {a, b}, [an, bn](const Tensor<T>& g) {
    if (an->requires_grad) an->Grad().map().noalias() += g.map() * bn->value.map().transpose();
    if (bn->requires_grad) bn->Grad().map().noalias() += an->value.map().transpose() * g.map();
  });
}

template <typename T>
Var<T> Add(const Var<T>& a, const Var<T>& b) {
  CheckShape(a.value().SameShape(b.value()), "add", a.shape(), b.shape());
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return MakeResult<T>(std::move(out), {a, b}, [an, bn](const Tensor<T>& g) {
    Accumulate(an, g);
    Accumulate(bn, g);
  });
}

template <typename T>
Var<T> Sub(const Var<T>& a, const Var<T>& b) {
  CheckShape(a.value().SameShape(b.value()), "sub", a.shape(), b.shape());
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return MakeResult<T>(std::move(out), {a, b}, [an, bn](const Tensor<T>& g) {
    Accumulate(an, g);
    if (bn->requires_grad) {
      auto& dst = bn->Grad();
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] -= g[i];
    }
  });
}

template <typename T>
Var<T> Mul(const Var<T>& a, const Var<T>& b) {
  CheckShape(a.value().SameShape(b.value()), "mul", a.shape(), b.shape());
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  Node<T>* an = a.node();
  Node<T>* bn = b.node();
  return MakeResult<T>(std::move(out), {a, b}, [an, bn](const Tensor<T>& g) {
    if (an->requires_grad) {
      auto& dst = an->Grad();
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * bn->value[i];
    }
    if (bn->requires_grad) {
      auto& dst = bn->Grad();
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * an->value[i];
    }
  });
}

template <typename T>
Var<T> AddBias(const Var<T>& x, const Var<T>& bias) {
  CheckShape(bias.value().size() == x.cols(), "add_bias", x.shape(), bias.shape());
  Tensor<T> out = x.value();
  const std::size_t rows = out.rows(), cols = out.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bias.value()[c];
  }
  Node<T>* xn = x.node();
  Node<T>* bn = bias.node();
  return MakeResult<T>(std::move(out), {x, bias}, [xn, bn, rows, cols](const Tensor<T>& g) {
    Accumulate(xn, g);
    if (bn->requires_grad) {
      auto& dst = bn->Grad();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) dst[c] += g[r * cols + c];
      }
    }
  });
}

template <typename T>
Var<T> Scale(const Var<T>& x, T factor) {
  Tensor<T> out = x.value();
  for (auto& v : out.values()) v *= factor;
  Node<T>* xn = x.node();
  return MakeResult<T>(std::move(out), {x}, [xn, factor](const Tensor<T>& g) {
    auto& dst = xn->Grad();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * factor;
  });
}

template <typename T>
Var<T> MulRows(const Var<T>& x, std::span<const T> weights) {
  Require(weights.size() == x.rows(), "mul_rows: weight count does not match rows");
  Tensor<T> out = x.value();
  const std::size_t cols = out.cols();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] *= weights[r];
  }
  Node<T>* xn = x.node();
  std::vector<T> w(weights.begin(), weights.end());
  return MakeResult<T>(std::move(out), {x}, [xn, w = std::move(w), cols](const Tensor<T>& g) {
    auto& dst = xn->Grad();
    for (std::size_t r = 0; r < w.size(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) dst[r * cols + c] += g[r * cols + c] * w[r];
    }
  });
}

namespace {
thread_local ActivationPatternTrace* g_pattern_trace = nullptr;
}  // namespace

ActivationPatternTrace::ActivationPatternTrace() : previous_(g_pattern_trace) {
  g_pattern_trace = this;
}

ActivationPatternTrace::~ActivationPatternTrace() { g_pattern_trace = previous_; }

ActivationPatternTrace* ActivationPatternTrace::Current() { return g_pattern_trace; }

template <typename T>
Var<T> Relu(const Var<T>& x) {
  Tensor<T> out = x.value();
  for (auto& v : out.values()) v = v > T(0) ? v : T(0);
  if (ActivationPatternTrace* trace = g_pattern_trace) {
    std::uint64_t word = 0;
    std::size_t i = 0;
    for (T v : x.value().values()) {
      word = (word << 1) | (v > T(0) ? 1u : 0u);
      if (++i % 64 == 0) {
        trace->Fold(word);
        word = 0;
      }
    }
    trace->Fold(word ^ (static_cast<std::uint64_t>(i) << 32));
  }
  Node<T>* xn = x.node();
  return MakeResult<T>(std::move(out), {x}, [xn](const Tensor<T>& g) {
    auto& dst = xn->Grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xn->value[i] > T(0)) dst[i] += g[i];
    }
  });
}

template <typename T>
Var<T> SoftmaxRows(const Var<T>& x) {
  Require(x.cols() > 0, "softmax: empty axis");
  Tensor<T> out = x.value();
  SoftmaxInPlace<T>(out.map());
  auto result = MakeResult<T>(std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    Node<T>* xn = x.node();
    Node<T>* self = result.node();
    result.node()->backward = [xn, self](const Tensor<T>& g) {
      const Mat<T> p = self->value.map();
      const Mat<T> ds = SoftmaxBackward<T>(p, g.map());
      xn->Grad().map() += ds;
    };
  }
  return result;
}

template <typename T>
Var<T> LayerNorm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps) {
  const std::size_t rows = x.rows(), cols = x.cols();
  CheckShape(gamma.value().size() == cols && beta.value().size() == cols, "layer_norm",
             x.shape(), gamma.shape());
  Tensor<T> out(x.shape());
  std::vector<T> xhat(rows * cols);
  std::vector<T> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = x.value().data() + r * cols;
    T mean = 0;
    for (std::size_t c = 0; c < cols; ++c) mean += row[c];
    mean /= static_cast<T>(cols);
    T var = 0;
    for (std::size_t c = 0; c < cols; ++c) var += (row[c] - mean) * (row[c] - mean);
    var /= static_cast<T>(cols);
    inv_std[r] = T(1) / std::sqrt(var + eps);
    for (std::size_t c = 0; c < cols; ++c) {
      const T h = (row[c] - mean) * inv_std[r];
      xhat[r * cols + c] = h;
      out[r * cols + c] = h * gamma.value()[c] + beta.value()[c];
    }
  }
  Node<T>* xn = x.node();
  Node<T>* gn = gamma.node();
  Node<T>* bn = beta.node();
  return MakeResult<T>(
      std::move(out), {x, gamma, beta},
      [xn, gn, bn, rows, cols, xhat = std::move(xhat), inv_std = std::move(inv_std)](
          const Tensor<T>& g) {
        if (gn->requires_grad || bn->requires_grad) {
          auto& dg = gn->Grad();
          auto& db = bn->Grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
              dg[c] += g[r * cols + c] * xhat[r * cols + c];
              db[c] += g[r * cols + c];
            }
          }
        }
        if (!xn->requires_grad) return;
        auto& dx = xn->Grad();
        std::vector<T> dxhat(cols);
        for (std::size_t r = 0; r < rows; ++r) {
          T mean_d = 0, mean_dx = 0;
          for (std::size_t c = 0; c < cols; ++c) {
            dxhat[c] = g[r * cols + c] * gn->value[c];
            mean_d += dxhat[c];
            mean_dx += dxhat[c] * xhat[r * cols + c];
          }
          mean_d /= static_cast<T>(cols);
          mean_dx /= static_cast<T>(cols);
          for (std::size_t c = 0; c < cols; ++c) {
            dx[r * cols + c] +=
                inv_std[r] * (dxhat[c] - mean_d - xhat[r * cols + c] * mean_dx);
          }
        }
      });
}

template <typename T>
Var<T> Conv1d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, std::size_t kernel,
              const SeqLayout& layout) {
  Require(kernel % 2 == 1, "conv1d: kernel size must be odd for same padding");
  const std::size_t in = x.cols();
  const std::size_t out_ch = weight.cols();
  Require(x.rows() == layout.rows(), "conv1d: input rows do not match layout");
  CheckShape(weight.rows() == kernel * in && bias.value().size() == out_ch, "conv1d",
             x.shape(), weight.shape());
  const std::size_t rows = layout.rows();
  const std::size_t T_len = layout.max_len;
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(kernel / 2);
  Mat<T> cols =
      Mat<T>::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(kernel * in));
  const auto xm = x.value().map();
  // Taps outside the sequence, padding rows included, read zeros.
  for (std::size_t b = 0; b < layout.batch; ++b) {
    const auto len = static_cast<std::ptrdiff_t>(layout.lengths[b]);
    for (std::size_t t = 0; t < T_len; ++t) {
      const auto row = static_cast<Eigen::Index>(b * T_len + t);
      for (std::size_t k = 0; k < kernel; ++k) {
        const std::ptrdiff_t src =
            static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(k) - pad;
        if (src < 0 || src >= len) continue;
        cols.block(row, static_cast<Eigen::Index>(k * in), 1, static_cast<Eigen::Index>(in)) =
            xm.row(static_cast<Eigen::Index>(b * T_len + src));
      }
    }
  }
  Tensor<T> out = Tensor<T>::Matrix2D(rows, out_ch);
  out.map().noalias() = cols * weight.value().map();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < out_ch; ++c) out[r * out_ch + c] += bias.value()[c];
  }
  Node<T>* xn = x.node();
  Node<T>* wn = weight.node();
  Node<T>* bn = bias.node();
  return MakeResult<T>(
      std::move(out), {x, weight, bias},
      [xn, wn, bn, cols = std::move(cols), kernel, in, out_ch, rows, T_len, pad,
       lengths = layout.lengths](const Tensor<T>& g) {
        const auto gm = g.map();
        if (wn->requires_grad) wn->Grad().map().noalias() += cols.transpose() * gm;
        if (bn->requires_grad) {
          auto& db = bn->Grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < out_ch; ++c) db[c] += g[r * out_ch + c];
          }
        }
        if (!xn->requires_grad) return;
        const Mat<T> dcols = gm * wn->value.map().transpose();
        auto dx = xn->Grad().map();
        for (std::size_t b = 0; b < lengths.size(); ++b) {
          const auto len = static_cast<std::ptrdiff_t>(lengths[b]);
          for (std::size_t t = 0; t < T_len; ++t) {
            const auto row = static_cast<Eigen::Index>(b * T_len + t);
            for (std::size_t k = 0; k < kernel; ++k) {
              const std::ptrdiff_t src =
                  static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(k) - pad;
              if (src < 0 || src >= len) continue;
              dx.row(static_cast<Eigen::Index>(b * T_len + src)) +=
                  dcols.block(row, static_cast<Eigen::Index>(k * in), 1,
                              static_cast<Eigen::Index>(in));
            }
          }
        }
      });
}

template <typename T>
Var<T> GatherRows(const Var<T>& table, std::span<const std::ptrdiff_t> indices) {
  const std::size_t cols = table.cols();
  const auto n_rows = static_cast<std::ptrdiff_t>(table.rows());
  Tensor<T> out = Tensor<T>::Matrix2D(indices.size(), cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::ptrdiff_t src = indices[i];
    if (src < 0) continue;
    Require(src < n_rows, "gather_rows: index " + std::to_string(src) + " out of range");
    std::copy_n(table.value().data() + src * cols, cols, out.data() + i * cols);
  }
  Node<T>* tn = table.node();
  std::vector<std::ptrdiff_t> idx(indices.begin(), indices.end());
  return MakeResult<T>(std::move(out), {table},
                       [tn, idx = std::move(idx), cols](const Tensor<T>& g) {
                         auto& dst = tn->Grad();
                         for (std::size_t i = 0; i < idx.size(); ++i) {
                           if (idx[i] < 0) continue;
                           T* d = dst.data() + idx[i] * cols;
                           const T* s = g.data() + i * cols;
                           for (std::size_t c = 0; c < cols; ++c) d[c] += s[c];
                         }
                       });
}

template <typename T>
Var<T> Dropout(const Var<T>& x, T rate, Rng& rng, bool training) {
  Require(rate >= T(0) && rate < T(1), "dropout: rate must be in [0, 1)");
  if (!training || rate == T(0)) return x;
  const T keep_scale = T(1) / (T(1) - rate);
  std::vector<T> mask(x.value().size());
  for (auto& m : mask) m = rng.Uniform() >= static_cast<double>(rate) ? keep_scale : T(0);
  Tensor<T> out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  Node<T>* xn = x.node();
  return MakeResult<T>(std::move(out), {x}, [xn, mask = std::move(mask)](const Tensor<T>& g) {
    auto& dst = xn->Grad();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * mask[i];
  });
}

template <typename T>
Var<T> ScaledDotAttention(const Var<T>& q, const Var<T>& k, const Var<T>& v,
                          const Tensor<T>& additive_mask) {
  CheckShape(q.cols() == k.cols() && k.rows() == v.rows(), "attention", q.shape(), k.shape());
  CheckShape(additive_mask.rows() == q.rows() && additive_mask.cols() == k.rows(),
             "attention mask", additive_mask.shape(), {q.rows(), k.rows()});
  const T scale = T(1) / std::sqrt(static_cast<T>(q.cols()));
  Mat<T> p = (q.value().map() * k.value().map().transpose()) * scale;
  p += additive_mask.map();
  SoftmaxInPlace<T>(p);
  Tensor<T> out = Tensor<T>::Matrix2D(q.rows(), v.cols());
  out.map().noalias() = p * v.value().map();
  Node<T>* qn = q.node();
  Node<T>* kn = k.node();
  Node<T>* vn = v.node();
  return MakeResult<T>(std::move(out), {q, k, v},
                       [qn, kn, vn, p = std::move(p), scale](const Tensor<T>& g) {
                         const auto gm = g.map();
                         if (vn->requires_grad) vn->Grad().map().noalias() += p.transpose() * gm;
                         const Mat<T> dp = gm * vn->value.map().transpose();
                         const Mat<T> ds = SoftmaxBackward<T>(p, dp) * scale;
                         if (qn->requires_grad) qn->Grad().map().noalias() += ds * kn->value.map();
                         if (kn->requires_grad) {
                           kn->Grad().map().noalias() += ds.transpose() * qn->value.map();
                         }
                       });
}

template <typename T>
Var<T> MultiHeadAttention(const Var<T>& q, const Var<T>& k, const Var<T>& v,
                          std::size_t n_heads, const SeqLayout& layout) {
  const std::size_t width = q.cols();
  CheckShape(k.value().SameShape(q.value()) && v.value().SameShape(q.value()), "mha",
             q.shape(), k.shape());
  Require(q.rows() == layout.rows(), "mha: rows do not match layout");
  Require(n_heads > 0 && width % n_heads == 0, "mha: width not divisible by heads");
  const std::size_t d = width / n_heads;
  const auto L = static_cast<Eigen::Index>(layout.max_len);
  const T scale = T(1) / std::sqrt(static_cast<T>(d));
  const T neg_inf = -std::numeric_limits<T>::infinity();

  Tensor<T> out = Tensor<T>::Matrix2D(q.rows(), width);
  std::vector<Mat<T>> probs(layout.batch * n_heads);
  const auto qm = q.value().map();
  const auto km = k.value().map();
  const auto vm = v.value().map();
  auto om = out.map();
  for (std::size_t b = 0; b < layout.batch; ++b) {
    Require(layout.lengths[b] >= 1, "mha: empty sequence");
    const auto len = static_cast<Eigen::Index>(layout.lengths[b]);
    const auto r0 = static_cast<Eigen::Index>(b) * L;
    for (std::size_t h = 0; h < n_heads; ++h) {
      const auto c0 = static_cast<Eigen::Index>(h * d);
      const auto dd = static_cast<Eigen::Index>(d);
      Mat<T> s = (qm.block(r0, c0, L, dd) * km.block(r0, c0, L, dd).transpose()) * scale;
      if (len < L) s.rightCols(L - len).setConstant(neg_inf);
      SoftmaxInPlace<T>(s);
      om.block(r0, c0, L, dd).noalias() = s * vm.block(r0, c0, L, dd);
      probs[b * n_heads + h] = std::move(s);
    }
  }
  Node<T>* qn = q.node();
  Node<T>* kn = k.node();
  Node<T>* vn = v.node();
  return MakeResult<T>(
      std::move(out), {q, k, v},
      [qn, kn, vn, probs = std::move(probs), n_heads, d, L, scale,
       batch = layout.batch](const Tensor<T>& g) {
        const auto gm = g.map();
        const auto qv = qn->value.map();
        const auto kv = kn->value.map();
        const auto vv = vn->value.map();
        for (std::size_t b = 0; b < batch; ++b) {
          const auto r0 = static_cast<Eigen::Index>(b) * L;
          for (std::size_t h = 0; h < n_heads; ++h) {
            const auto c0 = static_cast<Eigen::Index>(h * d);
            const auto dd = static_cast<Eigen::Index>(d);
            const Mat<T>& p = probs[b * n_heads + h];
            const auto go = gm.block(r0, c0, L, dd);
            if (vn->requires_grad) {
              vn->Grad().map().block(r0, c0, L, dd).noalias() += p.transpose() * go;
            }
            const Mat<T> dp = go * vv.block(r0, c0, L, dd).transpose();
            const Mat<T> ds = SoftmaxBackward<T>(p, dp) * scale;
            if (qn->requires_grad) {
              qn->Grad().map().block(r0, c0, L, dd).noalias() += ds * kv.block(r0, c0, L, dd);
            }
            if (kn->requires_grad) {
              kn->Grad().map().block(r0, c0, L, dd).noalias() +=
                  ds.transpose() * qv.block(r0, c0, L, dd);
            }
          }
        }
      });
}

template <typename T>
Var<T> MeanPool(const Var<T>& x, const SeqLayout& layout) {
  Require(x.rows() == layout.rows(), "mean_pool: rows do not match layout");
  const std::size_t cols = x.cols();
  Tensor<T> out = Tensor<T>::Matrix2D(layout.batch, cols);
  for (std::size_t b = 0; b < layout.batch; ++b) {
    Require(layout.lengths[b] >= 1, "mean_pool: empty sequence");
    const T inv = T(1) / static_cast<T>(layout.lengths[b]);
    for (std::size_t t = 0; t < layout.lengths[b]; ++t) {
      const T* src = x.value().data() + (b * layout.max_len + t) * cols;
      for (std::size_t c = 0; c < cols; ++c) out[b * cols + c] += src[c] * inv;
    }
  }
  Node<T>* xn = x.node();
  return MakeResult<T>(std::move(out), {x}, [xn, layout, cols](const Tensor<T>& g) {
    auto& dst = xn->Grad();
    for (std::size_t b = 0; b < layout.batch; ++b) {
      const T inv = T(1) / static_cast<T>(layout.lengths[b]);
      for (std::size_t t = 0; t < layout.lengths[b]; ++t) {
        T* d = dst.data() + (b * layout.max_len + t) * cols;
        for (std::size_t c = 0; c < cols; ++c) d[c] += g[b * cols + c] * inv;
      }
    }
  });
}

template <typename T>
Var<T> Sum(const Var<T>& x) {
  T total = 0;
  for (T v : x.value().values()) total += v;
  Node<T>* xn = x.node();
  return MakeResult<T>(Tensor<T>({1}, total), {x}, [xn](const Tensor<T>& g) {
    auto& dst = xn->Grad();
    for (auto& v : dst.values()) v += g[0];
  });
}

template <typename T>
Var<T> MaskedMse(const Var<T>& pred, const Tensor<T>& target, std::span<const T> row_weights) {
  CheckShape(pred.value().SameShape(target), "masked_mse", pred.shape(), target.shape());
  Require(row_weights.size() == pred.rows(), "masked_mse: weight count does not match rows");
  const std::size_t cols = pred.cols();
  T weight_sum = 0;
  for (T w : row_weights) weight_sum += w;
  Require(weight_sum > T(0), "masked_mse: empty mask");
  const T norm = T(1) / (weight_sum * static_cast<T>(cols));
  T total = 0;
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    if (row_weights[r] == T(0)) continue;
    T acc = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      const T diff = pred.value()[r * cols + c] - target[r * cols + c];
      acc += diff * diff;
    }
    total += row_weights[r] * acc;
  }
  Node<T>* pn = pred.node();
  std::vector<T> w(row_weights.begin(), row_weights.end());
  return MakeResult<T>(Tensor<T>({1}, total * norm), {pred},
                       [pn, target, w = std::move(w), norm, cols](const Tensor<T>& g) {
                         auto& dst = pn->Grad();
                         for (std::size_t r = 0; r < w.size(); ++r) {
                           if (w[r] == T(0)) continue;
                           const T f = T(2) * w[r] * norm * g[0];
                           for (std::size_t c = 0; c < cols; ++c) {
                             dst[r * cols + c] +=
                                 f * (pn->value[r * cols + c] - target[r * cols + c]);
                           }
                         }
                       });
}

template <typename T>
Var<T> CrossEntropy(const Var<T>& logits, std::span<const int> labels) {
  Require(labels.size() == logits.rows() && !labels.empty(),
          "cross_entropy: label count does not match rows");
  const std::size_t classes = logits.cols();
  Mat<T> p = logits.value().map();
  SoftmaxInPlace<T>(p);
  T total = 0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    Require(labels[r] >= 0 && static_cast<std::size_t>(labels[r]) < classes,
            "cross_entropy: label out of range");
    // log-softmax computed from the logits directly for accuracy.
    const auto row = logits.value().map().row(static_cast<Eigen::Index>(r));
    const T mx = row.maxCoeff();
    T lse = 0;
    for (Eigen::Index c = 0; c < row.size(); ++c) lse += std::exp(row(c) - mx);
    total -= row(labels[r]) - mx - std::log(lse);
  }
  const T inv = T(1) / static_cast<T>(labels.size());
  Node<T>* ln = logits.node();
  std::vector<int> lab(labels.begin(), labels.end());
  return MakeResult<T>(
      Tensor<T>({1}, total * inv), {logits},
      [ln, p = std::move(p), lab = std::move(lab), inv, classes](const Tensor<T>& g) {
        auto& dst = ln->Grad();
        for (std::size_t r = 0; r < lab.size(); ++r) {
          for (std::size_t c = 0; c < classes; ++c) {
            const T y = static_cast<int>(c) == lab[r] ? T(1) : T(0);
            dst[r * classes + c] +=
                g[0] * inv * (p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - y);
          }
        }
      });
}

#define DYSTTS_INSTANTIATE_OPS(T)                                                            \
  template Var<T> MatMul(const Var<T>&, const Var<T>&);                                      \
  template Var<T> Add(const Var<T>&, const Var<T>&);                                         \
  template Var<T> Sub(const Var<T>&, const Var<T>&);                                         \
  template Var<T> Mul(const Var<T>&, const Var<T>&);                                         \
  template Var<T> AddBias(const Var<T>&, const Var<T>&);                                     \
  template Var<T> Scale(const Var<T>&, T);                                                   \
  template Var<T> MulRows(const Var<T>&, std::span<const T>);                                \
  template Var<T> Relu(const Var<T>&);                                                       \
  template Var<T> SoftmaxRows(const Var<T>&);                                                \
  template Var<T> LayerNorm(const Var<T>&, const Var<T>&, const Var<T>&, T);                 \
  template Var<T> Conv1d(const Var<T>&, const Var<T>&, const Var<T>&, std::size_t,           \
                         const SeqLayout&);                                                  \
  template Var<T> GatherRows(const Var<T>&, std::span<const std::ptrdiff_t>);                \
  template Var<T> Dropout(const Var<T>&, T, Rng&, bool);                                     \
  template Var<T> ScaledDotAttention(const Var<T>&, const Var<T>&, const Var<T>&,            \
                                     const Tensor<T>&);                                      \
  template Var<T> MultiHeadAttention(const Var<T>&, const Var<T>&, const Var<T>&,            \
                                     std::size_t, const SeqLayout&);                         \
  template Var<T> MeanPool(const Var<T>&, const SeqLayout&);                                 \
  template Var<T> Sum(const Var<T>&);                                                        \
  template Var<T> MaskedMse(const Var<T>&, const Tensor<T>&, std::span<const T>);            \
  template Var<T> CrossEntropy(const Var<T>&, std::span<const int>);

DYSTTS_INSTANTIATE_OPS(float)
DYSTTS_INSTANTIATE_OPS(double)
DYSTTS_INSTANTIATE_OPS(long double)

}  // namespace dystts::nn
