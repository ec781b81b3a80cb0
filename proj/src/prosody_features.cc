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

#include "dystts/prosody_features.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dystts/error.h"

namespace dystts {
namespace {

// Population mean/std of the values, summed in sorted order so the result
// does not depend on the order values were collected in.
std::pair<double, double> MeanStd(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = (values[i] - mean) * (values[i] - mean);
  }
  std::sort(sq.begin(), sq.end());
  double ss = 0.0;
  for (double v : sq) ss += v;
  const double std = std::sqrt(ss / static_cast<double>(values.size()));
  return {mean, std::max(std, kStdFloor)};
}

}  // namespace

std::vector<double> ExtractF0(std::span<const float> samples, const FrameParams& params,
                              const F0Options& options) {
  Require(!samples.empty(), "extract_f0: empty signal");
  params.Validate();
  const int n = params.win_length;
  const int lag_min =
      std::max(2, static_cast<int>(std::floor(params.sample_rate / options.max_hz)));
  const int lag_max =
      std::min(n - 2, static_cast<int>(std::ceil(params.sample_rate / options.min_hz)));
  const std::size_t n_frames = params.NumFrames(samples.size());

  std::vector<double> f0(n_frames, 0.0);
  std::vector<double> frame(n);
  std::vector<double> prefix(n + 1);
  std::vector<double> r(lag_max + 2, 0.0);
  for (std::size_t t = 0; t < n_frames; ++t) {
    ExtractFrame(samples, params, t, frame);
    prefix[0] = 0.0;
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + frame[i] * frame[i];
    if (prefix[n] < 1e-10) continue;

    double best = -1.0;
    for (int lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
      double acc = 0.0;
      for (int i = 0; i + lag < n; ++i) acc += frame[i] * frame[i + lag];
      const double e0 = prefix[n - lag];
      const double e1 = prefix[n] - prefix[lag];
      r[lag] = (e0 > 0.0 && e1 > 0.0) ? acc / std::sqrt(e0 * e1) : 0.0;
      if (lag >= lag_min && lag <= lag_max) best = std::max(best, r[lag]);
    }
    if (best < options.voicing_threshold) continue;

    // Smallest-lag local maximum close to the global peak, to avoid
    // picking a multiple of the true period.
    int chosen = -1;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      if (r[lag] >= 0.9 * best && r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1]) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0) continue;
    const double a = r[chosen - 1], b = r[chosen], c = r[chosen + 1];
    const double denom = a - 2.0 * b + c;
    double offset = 0.0;
    if (std::abs(denom) > 1e-12) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    f0[t] = params.sample_rate / (chosen + offset);
  }
  return f0;
}

std::vector<double> ExtractEnergy(std::span<const float> samples, const FrameParams& params) {
  Require(!samples.empty(), "extract_energy: empty signal");
  params.Validate();
  const int n = params.win_length;
  const auto window = HannWindow(n);
  const std::size_t n_frames = params.NumFrames(samples.size());
  std::vector<double> energy(n_frames);
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < n_frames; ++t) {
    ExtractFrame(samples, params, t, frame);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = window[i] * frame[i];
      acc += v * v;
    }
    energy[t] = std::sqrt(acc / n);
  }
  return energy;
}

std::vector<int> PhonemeDurations(const Alignment& alignment, const FrameParams& params,
                                  std::size_t n_frames) {
  Require(!alignment.empty(), "phoneme_durations: empty alignment");
  ValidateAlignment(alignment);
  const double hop_s = params.HopSeconds();
  auto to_frame = [&](double t) { return static_cast<long>(std::lround(t / hop_s)); };
  const long last_end = to_frame(alignment.back().end);
  if (last_end > static_cast<long>(n_frames) + 1) {
    Fail(ErrorCode::kInvalidArgument,
         "phoneme_durations: alignment ends at frame " + std::to_string(last_end) +
             " but the utterance has " + std::to_string(n_frames) + " frames");
  }
  std::vector<int> durations(alignment.size());
  long assigned = 0;
  for (std::size_t i = 0; i + 1 < alignment.size(); ++i) {
    durations[i] = static_cast<int>(to_frame(alignment[i].end) - to_frame(alignment[i].start));
    assigned += durations[i];
  }
  const long remainder = static_cast<long>(n_frames) - assigned;
  if (remainder < 0) {
    Fail(ErrorCode::kInvalidArgument,
         "phoneme_durations: alignment covers more frames than the utterance");
  }
  durations.back() = static_cast<int>(remainder);
  return durations;
}

std::vector<double> PoolToPhoneme(std::span<const double> frame_values,
                                  std::span<const int> durations, PoolMode mode) {
  long total = 0;
  for (int d : durations) {
    Require(d >= 0, "pool_to_phoneme: negative duration");
    total += d;
  }
  if (static_cast<std::size_t>(total) != frame_values.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "pool_to_phoneme: " + std::to_string(frame_values.size()) +
             " frame values but durations sum to " + std::to_string(total));
  }
  std::vector<double> pooled(durations.size(), 0.0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < durations[i]; ++k, ++pos) {
      const double v = frame_values[pos];
      if (mode == PoolMode::kVoicedMean && v <= 0.0) continue;
      sum += v;
      ++count;
    }
    pooled[i] = count > 0 ? sum / count : 0.0;
  }
  return pooled;
}

std::size_t ProsodyTargets::TotalFrames() const {
  return static_cast<std::size_t>(std::accumulate(durations.begin(), durations.end(), 0L));
}

ProsodyTargets ExtractProsodyTargets(const Alignment& alignment,
                                     std::span<const float> samples,
                                     const FrameParams& params, std::size_t n_frames) {
  ProsodyTargets targets;
  targets.durations = PhonemeDurations(alignment, params, n_frames);
  targets.frame_pitch = ExtractF0(samples, params);
  targets.frame_energy = ExtractEnergy(samples, params);
  if (targets.frame_pitch.size() != n_frames) {
    Fail(ErrorCode::kInvalidArgument,
         "prosody targets: audio yields " + std::to_string(targets.frame_pitch.size()) +
             " frames but the mel has " + std::to_string(n_frames));
  }
  targets.pitch = PoolToPhoneme(targets.frame_pitch, targets.durations, PoolMode::kVoicedMean);
  targets.energy = PoolToPhoneme(targets.frame_energy, targets.durations, PoolMode::kMean);
  return targets;
}

Json NormStats::ToJson() const {
  Json j;
  j["pitch_mean"] = pitch_mean;
  j["pitch_std"] = pitch_std;
  j["energy_mean"] = energy_mean;
  j["energy_std"] = energy_std;
  j["log_duration_mean"] = log_duration_mean;
  j["log_duration_std"] = log_duration_std;
  return j;
}

NormStats NormStats::FromJson(const Json& j) {
  NormStats s;
  s.pitch_mean = j.at("pitch_mean").get<double>();
  s.pitch_std = j.at("pitch_std").get<double>();
  s.energy_mean = j.at("energy_mean").get<double>();
  s.energy_std = j.at("energy_std").get<double>();
  s.log_duration_mean = j.at("log_duration_mean").get<double>();
  s.log_duration_std = j.at("log_duration_std").get<double>();
  Require(s.pitch_std > 0 && s.energy_std > 0 && s.log_duration_std > 0,
          "norm stats: standard deviations must be positive");
  return s;
}

NormStats ComputeNormalization(std::span<const ProsodyTargets> corpus) {
  std::vector<double> pitch, energy, log_dur;
  for (const auto& t : corpus) {
    Require(t.pitch.size() == t.durations.size() && t.energy.size() == t.durations.size(),
            "compute_normalization: target lists differ in length");
    for (std::size_t i = 0; i < t.durations.size(); ++i) {
      if (t.pitch[i] > 0.0) pitch.push_back(t.pitch[i]);
      energy.push_back(t.energy[i]);
      log_dur.push_back(std::log1p(static_cast<double>(t.durations[i])));
    }
  }
  Require(pitch.size() >= 2, "compute_normalization: fewer than 2 voiced phonemes");
  NormStats s;
  std::tie(s.pitch_mean, s.pitch_std) = MeanStd(std::move(pitch));
  std::tie(s.energy_mean, s.energy_std) = MeanStd(std::move(energy));
  std::tie(s.log_duration_mean, s.log_duration_std) = MeanStd(std::move(log_dur));
  return s;
}

}  // namespace dystts
