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

#include "dystts/vocoder.h"

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "dystts/error.h"
#include "dystts/rng.h"

namespace dystts {

Eigen::MatrixXd MelToLinear(const MelSpectrogram& mel, const FrameParams& params,
                            double regularization) {
  params.Validate();
  Require(mel.n_mels == static_cast<std::size_t>(params.n_mels), "vocoder: mel channel mismatch");
  Require(mel.n_frames >= 1, "vocoder: empty mel");
  for (float v : mel.data) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNumeric, "vocoder: non-finite mel value");
  }
  const Eigen::MatrixXd fb = MelFilterbank(params);  // mels x bins
  Eigen::MatrixXd gram = fb * fb.transpose();
  const double lambda = regularization * gram.diagonal().mean();
  gram.diagonal().array() += lambda;
  // pinv = F^T (F F^T + lambda I)^-1, so linear = mel * (F F^T + lambda I)^-1 F.
  const Eigen::MatrixXd solve = gram.ldlt().solve(fb);  // mels x bins
  Eigen::MatrixXd m(mel.n_frames, mel.n_mels);
  for (std::size_t t = 0; t < mel.n_frames; ++t) {
    for (std::size_t c = 0; c < mel.n_mels; ++c) m(t, c) = mel.at(t, c);
  }
  return (m * solve).cwiseMax(0.0);
}

std::vector<float> GriffinLim(const MelSpectrogram& mel, const FrameParams& params,
                              const GriffinLimOptions& options) {
  Require(options.n_iters >= 0, "griffin_lim: n_iters must be >= 0");
  const Eigen::MatrixXd linear = MelToLinear(mel, params, options.regularization);
  Stft stft(params);
  const std::size_t frames = mel.n_frames;
  const int bins = params.NumBins();
  const double scale = stft.window_sum();
  Rng rng(options.seed);
  std::vector<Stft::Spectrum> spec(frames, Stft::Spectrum(bins));
  std::vector<std::vector<double>> phase(frames, std::vector<double>(bins));
  for (auto& row : phase) {
    for (double& p : row) p = rng.Uniform(-std::numbers::pi, std::numbers::pi);
  }
  auto assemble = [&] {
    for (std::size_t t = 0; t < frames; ++t) {
      for (int k = 0; k < bins; ++k) {
        spec[t][k] = std::polar(linear(t, k) * scale, phase[t][k]);
      }
    }
  };
  const int half = params.win_length / 2;
  const std::size_t inner = (frames - 1) * params.hop_length;
  for (int it = 0; it < options.n_iters; ++it) {
    assemble();
    const std::vector<double> padded = stft.Synthesize(spec);
    std::vector<float> signal(inner);
    for (std::size_t i = 0; i < inner; ++i) signal[i] = static_cast<float>(padded[half + i]);
    const auto estimate = stft.Analyze(signal);
    for (std::size_t t = 0; t < frames; ++t) {
      for (int k = 0; k < bins; ++k) {
        const auto& z = estimate[t][k];
        if (std::abs(z) > 0.0) phase[t][k] = std::arg(z);
      }
    }
  }
  assemble();
  const std::vector<double> padded = stft.Synthesize(spec);
  std::vector<float> out(padded.size());
  for (std::size_t i = 0; i < padded.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(padded[i], -1.0, 1.0));
  }
  return out;
}

}  // namespace dystts
