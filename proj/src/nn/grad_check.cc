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

#include "dystts/nn/grad_check.h"

#include <algorithm>
#include <cmath>

#include "dystts/rng.h"

namespace dystts::nn {
namespace {

double Evaluate(const std::function<Var<double>()>& loss, std::uint64_t* pattern) {
  NoGradGuard no_grad;
  ActivationPatternTrace trace;
  const Var<double> l = loss();
  Require(l.value().size() == 1, "grad_check: loss must be a scalar");
  const double v = l.value()[0];
  if (!std::isfinite(v)) Fail(ErrorCode::kNumeric, "grad_check: non-finite loss");
  *pattern = trace.fingerprint();
  return v;
}

}  // namespace

GradCheckResult GradCheck(std::vector<Parameter<double>>& leaves,
                          const std::function<Var<double>()>& loss, double eps) {
  GradCheckOptions options;
  options.eps = eps;
  return GradCheck(leaves, loss, options);
}

GradCheckResult GradCheck(std::vector<Parameter<double>>& leaves,
                          const std::function<Var<double>()>& loss,
                          const GradCheckOptions& options, const ReferenceLoss* reference) {
  const double eps = options.eps;
  Require(eps > 0.0, "grad_check: eps must be positive");
  Rng rng(options.seed);
  for (auto& p : leaves) p.var.grad().Fill(0.0);
  {
    const Var<double> l = loss();
    Require(l.value().size() == 1, "grad_check: loss must be a scalar");
    if (!std::isfinite(l.value()[0])) Fail(ErrorCode::kNumeric, "grad_check: non-finite loss");
    Backward(l);
  }
  // Loss at the current parameters, with the Relu activation pattern.
  auto evaluate = [&](std::uint64_t* pattern) -> long double {
    if (reference == nullptr) return Evaluate(loss, pattern);
    ActivationPatternTrace trace;
    const long double v = reference->evaluate();
    if (!std::isfinite(v)) Fail(ErrorCode::kNumeric, "grad_check: non-finite reference loss");
    *pattern = trace.fingerprint();
    return v;
  };
  std::uint64_t base_pattern = 0;
  evaluate(&base_pattern);
  GradCheckResult result;
  for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
    auto& p = leaves[leaf];
    const Tensor<double> analytic = p.var.grad();
    auto& values = p.var.mutable_value();
    std::vector<std::size_t> entries(values.size());
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] = i;
    const std::size_t limit = options.max_entries_per_parameter;
    if (limit > 0 && limit < entries.size()) {
      for (std::size_t k = 0; k < limit; ++k) {
        std::swap(entries[k], entries[k + rng.UniformInt(entries.size() - k)]);
      }
      entries.resize(limit);
      std::sort(entries.begin(), entries.end());
    }
    for (std::size_t i : entries) {
      const double saved = values[i];
      long double step = eps;
      bool at_kink = true;
      double numeric = 0.0;
      for (int attempt = 0; attempt <= options.kink_retries && at_kink; ++attempt) {
        if (attempt > 0) step /= 10;
        std::uint64_t plus_pattern = 0, minus_pattern = 0;
        long double plus = 0, minus = 0;
        if (reference == nullptr) {
          values[i] = static_cast<double>(saved + step);
          plus = evaluate(&plus_pattern);
          values[i] = static_cast<double>(saved - step);
          minus = evaluate(&minus_pattern);
          values[i] = saved;
        } else {
          reference->set(leaf, i, saved + step);
          plus = evaluate(&plus_pattern);
          reference->set(leaf, i, saved - step);
          minus = evaluate(&minus_pattern);
          reference->set(leaf, i, saved);
        }
        at_kink = options.skip_kinks &&
                  (plus_pattern != base_pattern || minus_pattern != base_pattern);
        numeric = static_cast<double>((plus - minus) / (2 * step));
      }
      if (at_kink) {
        ++result.entries_at_kinks;
        continue;
      }
      const double a = analytic[i];
      const double rel =
          std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), options.floor});
      ++result.entries_checked;
      if (rel >= result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_parameter = p.name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace dystts::nn
