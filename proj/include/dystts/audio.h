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

#ifndef DYSTTS_AUDIO_H_
#define DYSTTS_AUDIO_H_

#include <complex>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dystts/corpus_io.h"

namespace dystts {

// Analysis framing shared by feature extraction, mel computation and the
// vocoder. Frames are centered: the signal is zero-padded by win_length / 2
// on both sides, so frame t is centered on sample t * hop_length.
struct FrameParams {
  int sample_rate = 16000;
  int win_length = 1024;
  int hop_length = 256;
  int n_mels = kNumMels;
  double fmin = 0.0;
  double fmax = 8000.0;

  double HopSeconds() const {
    return static_cast<double>(hop_length) / sample_rate;
  }
  std::size_t NumFrames(std::size_t n_samples) const {
    return 1 + n_samples / static_cast<std::size_t>(hop_length);
  }
  int NumBins() const { return win_length / 2 + 1; }
  void Validate() const;
};

// Periodic Hann window of length n.
std::vector<double> HannWindow(int n);

// Copies frame t of the centered framing into `out` (length win_length),
// zero-filling outside the signal.
void ExtractFrame(std::span<const float> samples, const FrameParams& params,
                  std::size_t t, std::span<double> out);

// Short-time Fourier transform with the framing above. Magnitudes are
// divided by the window sum, so a unit-amplitude sinusoid peaks near 0.5.
class Stft {
 public:
  explicit Stft(const FrameParams& params);
  ~Stft();
  Stft(const Stft&) = delete;
  Stft& operator=(const Stft&) = delete;

  using Spectrum = std::vector<std::complex<double>>;

  // One spectrum (NumBins() values, unnormalized) per frame.
  std::vector<Spectrum> Analyze(std::span<const float> samples);
  // Weighted overlap-add inverse. Returns the padded-domain signal of length
  // (n_frames - 1) * hop + win.
  std::vector<double> Synthesize(const std::vector<Spectrum>& frames);

  double window_sum() const { return window_sum_; }
  const FrameParams& params() const { return params_; }

 private:
  struct Plans;
  FrameParams params_;
  std::vector<double> window_;
  double window_sum_ = 0.0;
  std::unique_ptr<Plans> plans_;
};

// n_mels x n_bins triangular filters on the HTK mel scale, unit peak.
Eigen::MatrixXd MelFilterbank(const FrameParams& params);

// Normalized magnitude spectrogram, n_frames x n_bins.
Eigen::MatrixXd MagnitudeSpectrogram(std::span<const float> samples,
                                     const FrameParams& params);
MelSpectrogram ComputeMel(std::span<const float> samples,
                          const FrameParams& params);

struct Waveform {
  int sample_rate = 16000;
  std::vector<float> samples;
};

// 16-bit PCM mono WAV. Samples are clipped to [-1, 1].
void WriteWav(const std::filesystem::path& path, std::span<const float> samples,
              int sample_rate);
std::vector<std::uint8_t> EncodeWav(std::span<const float> samples,
                                    int sample_rate);
Waveform ReadWav(const std::filesystem::path& path);

}  // namespace dystts

#endif  // DYSTTS_AUDIO_H_
