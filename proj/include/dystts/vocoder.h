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

#ifndef DYSTTS_VOCODER_H_
#define DYSTTS_VOCODER_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dystts/audio.h"
#include "dystts/corpus_io.h"

namespace dystts {

struct GriffinLimOptions {
  int n_iters = 60;
  std::uint64_t seed = 0;
  // Tikhonov weight, relative to the mean diagonal of F F^T.
  double regularization = 1e-3;
};

// Linear magnitude spectrogram (n_frames x n_bins, window-sum normalized)
// from a mel spectrogram via the regularized pseudo-inverse of the
// filterbank; negative values are clipped to 0.
Eigen::MatrixXd MelToLinear(const MelSpectrogram& mel, const FrameParams& params,
                            double regularization = 1e-3);

// Samples in [-1, 1]; length (n_frames - 1) * hop + win.
std::vector<float> GriffinLim(const MelSpectrogram& mel, const FrameParams& params,
                              const GriffinLimOptions& options = {});

}  // namespace dystts

#endif  // DYSTTS_VOCODER_H_
