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

#ifndef DYSTTS_PROSODY_FEATURES_H_
#define DYSTTS_PROSODY_FEATURES_H_

#include <span>
#include <vector>

#include "dystts/audio.h"
#include "dystts/corpus_io.h"

namespace dystts {

struct F0Options {
  double min_hz = 60.0;
  double max_hz = 400.0;
  double voicing_threshold = 0.3;  // on the normalized autocorrelation peak
};

// Per-frame F0 in Hz from the normalized autocorrelation of each centered
// frame; 0 marks unvoiced frames.
std::vector<double> ExtractF0(std::span<const float> samples,
                              const FrameParams& params,
                              const F0Options& options = {});

// Per-frame RMS of the Hann-windowed frame: sqrt(sum((w*x)^2) / win_length).
std::vector<double> ExtractEnergy(std::span<const float> samples,
                                  const FrameParams& params);

// Frame counts per alignment entry: round(end/hop_s) - round(start/hop_s),
// with the last entry absorbing the remainder so the counts sum to n_frames.
std::vector<int> PhonemeDurations(const Alignment& alignment,
                                  const FrameParams& params,
                                  std::size_t n_frames);

enum class PoolMode {
  kMean,
  kVoicedMean,  // zeros (unvoiced frames) are excluded; 0 when none remain
};

std::vector<double> PoolToPhoneme(std::span<const double> frame_values,
                                  std::span<const int> durations,
                                  PoolMode mode = PoolMode::kMean);

struct ProsodyTargets {
  std::vector<int> durations;
  std::vector<double> pitch;   // Hz, 0 for unvoiced phonemes
  std::vector<double> energy;
  // Frame-level tracks, used when the variance adaptor runs in frame mode.
  std::vector<double> frame_pitch;
  std::vector<double> frame_energy;

  std::size_t TotalFrames() const;
};

// Durations from the alignment, pitch and energy from the audio, pooled per
// phoneme. n_frames is the mel frame count of the paired spectrogram.
ProsodyTargets ExtractProsodyTargets(const Alignment& alignment,
                                     std::span<const float> samples,
                                     const FrameParams& params,
                                     std::size_t n_frames);

struct NormStats {
  double pitch_mean = 0.0, pitch_std = 1.0;
  double energy_mean = 0.0, energy_std = 1.0;
  double log_duration_mean = 0.0, log_duration_std = 1.0;

  Json ToJson() const;
  static NormStats FromJson(const Json& j);
  bool operator==(const NormStats&) const = default;
};

inline constexpr double kStdFloor = 1e-5;

// Population statistics over all phonemes; pitch over voiced phonemes only;
// durations in log(1 + d). Independent of utterance order.
NormStats ComputeNormalization(std::span<const ProsodyTargets> corpus);

}  // namespace dystts

#endif  // DYSTTS_PROSODY_FEATURES_H_
