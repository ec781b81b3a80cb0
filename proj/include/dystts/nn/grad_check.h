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

#ifndef DYSTTS_NN_GRAD_CHECK_H_
#define DYSTTS_NN_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dystts/nn/layers.h"

namespace dystts::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
  // Entries whose +-eps perturbation changed the activation pattern of some
  // Relu at every step tried; the central difference there spans a kink and
  // is not compared.
  std::size_t entries_at_kinks = 0;
};

// Compares the reverse-mode gradient of `loss` w.r.t. every entry of every
// leaf in `leaves` against the central difference (f(x+eps) - f(x-eps)) / 2eps.
// Relative error is |a - n| / max(|a|, |n|, 1e-8). `loss` must rebuild the
// graph on each call and be deterministic.
GradCheckResult GradCheck(std::vector<Parameter<double>>& leaves,
                          const std::function<Var<double>()>& loss, double eps = 1e-4);

struct GradCheckOptions {
  double eps = 1e-4;
  double floor = 1e-8;  // denominator floor of the relative error
  // When nonzero, only this many entries per leaf are checked, chosen
  // without replacement by a generator seeded with `seed`.
  std::size_t max_entries_per_parameter = 0;
  std::uint64_t seed = 0;
  bool skip_kinks = true;
  // An entry at a kink is retried with eps shrunk tenfold, up to this many
  // times, before it is skipped.
  int kink_retries = 2;
};

// The same loss evaluated in extended precision at parameter values mirrored
// from the 64-bit leaves. When given, the finite differences are taken on it,
// which removes the 64-bit rounding noise of the loss from the comparison.
struct ReferenceLoss {
  // Writes entry `index` of leaf number `leaf`.
  std::function<void(std::size_t leaf, std::size_t index, long double value)> set;
  std::function<long double()> evaluate;
};

GradCheckResult GradCheck(std::vector<Parameter<double>>& leaves,
                          const std::function<Var<double>()>& loss,
                          const GradCheckOptions& options,
                          const ReferenceLoss* reference = nullptr);

}  // namespace dystts::nn

#endif  // DYSTTS_NN_GRAD_CHECK_H_
