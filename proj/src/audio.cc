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

#include "dystts/audio.h"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "dystts/byte_io.h"
#include "dystts/error.h"

namespace dystts {
namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

void FrameParams::Validate() const {
  Require(sample_rate > 0, "frame params: sample_rate must be positive");
  Require(win_length > 0 && (win_length & (win_length - 1)) == 0,
          "frame params: win_length must be a power of two");
  Require(hop_length > 0 && hop_length <= win_length,
          "frame params: need 0 < hop_length <= win_length");
  Require(n_mels == kNumMels, "frame params: n_mels must be 80");
  Require(fmin >= 0.0 && fmin < fmax, "frame params: need 0 <= fmin < fmax");
  Require(fmax <= sample_rate / 2.0, "frame params: fmax exceeds Nyquist");
}

std::vector<double> HannWindow(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

void ExtractFrame(std::span<const float> samples, const FrameParams& params,
                  std::size_t t, std::span<double> out) {
  const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t) * params.hop_length -
                               params.win_length / 2;
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  for (int i = 0; i < params.win_length; ++i) {
    const std::ptrdiff_t s = start + i;
    out[i] = (s >= 0 && s < n) ? samples[s] : 0.0;
  }
}

struct Stft::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  explicit Plans(int n) {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    forward = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
    fftw_free(real);
    fftw_free(spec);
  }
};

Stft::Stft(const FrameParams& params)
    : params_(params), window_(HannWindow(params.win_length)) {
  params_.Validate();
  for (double w : window_) window_sum_ += w;
  plans_ = std::make_unique<Plans>(params_.win_length);
}

Stft::~Stft() = default;

std::vector<Stft::Spectrum> Stft::Analyze(std::span<const float> samples) {
  const std::size_t n_frames = params_.NumFrames(samples.size());
  const int n = params_.win_length;
  const int bins = params_.NumBins();
  std::vector<Spectrum> out(n_frames, Spectrum(bins));
  std::span<double> frame(plans_->real, static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < n_frames; ++t) {
    ExtractFrame(samples, params_, t, frame);
    for (int i = 0; i < n; ++i) frame[i] *= window_[i];
    fftw_execute(plans_->forward);
    for (int k = 0; k < bins; ++k) {
      out[t][k] = {plans_->spec[k][0], plans_->spec[k][1]};
    }
  }
  return out;
}

std::vector<double> Stft::Synthesize(const std::vector<Spectrum>& frames) {
  Require(!frames.empty(), "istft: no frames");
  const int n = params_.win_length;
  const int hop = params_.hop_length;
  const int bins = params_.NumBins();
  const std::size_t length = (frames.size() - 1) * hop + n;
  std::vector<double> out(length, 0.0);
  std::vector<double> norm(length, 0.0);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    Require(static_cast<int>(frames[t].size()) == bins, "istft: bad bin count");
    for (int k = 0; k < bins; ++k) {
      plans_->spec[k][0] = frames[t][k].real();
      plans_->spec[k][1] = frames[t][k].imag();
    }
    fftw_execute(plans_->inverse);
    const std::size_t offset = t * hop;
    for (int i = 0; i < n; ++i) {
      // FFTW's inverse is unnormalized.
      out[offset + i] += window_[i] * plans_->real[i] / n;
      norm[offset + i] += window_[i] * window_[i];
    }
  }
  for (std::size_t i = 0; i < length; ++i) {
    if (norm[i] > 1e-8) out[i] /= norm[i];
  }
  return out;
}

Eigen::MatrixXd MelFilterbank(const FrameParams& params) {
  params.Validate();
  const int bins = params.NumBins();
  const double mel_lo = HzToMel(params.fmin);
  const double mel_hi = HzToMel(params.fmax);
  std::vector<double> edges(params.n_mels + 2);
  for (int i = 0; i < params.n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (params.n_mels + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(params.n_mels, bins);
  for (int m = 0; m < params.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * params.sample_rate / params.win_length;
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      fb(m, k) = w;
    }
  }
  return fb;
}

Eigen::MatrixXd MagnitudeSpectrogram(std::span<const float> samples,
                                     const FrameParams& params) {
  Stft stft(params);
  const auto frames = stft.Analyze(samples);
  Eigen::MatrixXd mag(static_cast<Eigen::Index>(frames.size()), params.NumBins());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (int k = 0; k < params.NumBins(); ++k) {
      mag(static_cast<Eigen::Index>(t), k) = std::abs(frames[t][k]) / stft.window_sum();
    }
  }
  return mag;
}

MelSpectrogram ComputeMel(std::span<const float> samples, const FrameParams& params) {
  Require(!samples.empty(), "mel: empty signal");
  const Eigen::MatrixXd mag = MagnitudeSpectrogram(samples, params);
  const Eigen::MatrixXd fb = MelFilterbank(params);
  const Eigen::MatrixXd mel = mag * fb.transpose();
  MelSpectrogram out(static_cast<std::size_t>(mel.rows()), params.n_mels);
  for (Eigen::Index t = 0; t < mel.rows(); ++t) {
    for (Eigen::Index m = 0; m < mel.cols(); ++m) {
      out.at(t, m) = static_cast<float>(mel(t, m));
    }
  }
  return out;
}

std::vector<std::uint8_t> EncodeWav(std::span<const float> samples, int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  ByteWriter w;
  w.Raw("RIFF");
  w.U32(36 + data_bytes);
  w.Raw("WAVE");
  w.Raw("fmt ");
  w.U32(16);
  w.U16(1);  // PCM
  w.U16(1);  // mono
  w.U32(static_cast<std::uint32_t>(sample_rate));
  w.U32(static_cast<std::uint32_t>(sample_rate) * 2);
  w.U16(2);
  w.U16(16);
  w.Raw("data");
  w.U32(data_bytes);
  for (float s : samples) {
    const double clipped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
    w.U16(static_cast<std::uint16_t>(q));
  }
  return std::move(w.bytes());
}

void WriteWav(const std::filesystem::path& path, std::span<const float> samples,
              int sample_rate) {
  WriteFileBytes(path, EncodeWav(samples, sample_rate));
}

Waveform ReadWav(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path.string());
  if (r.Raw(4) != "RIFF") Fail(ErrorCode::kParse, path.string() + ": not a RIFF file");
  r.U32();
  if (r.Raw(4) != "WAVE") Fail(ErrorCode::kParse, path.string() + ": not a WAVE file");
  Waveform wav;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::string id = r.Raw(4);
    const std::uint32_t size = r.U32();
    if (id == "fmt ") {
      const std::uint16_t format = r.U16();
      const std::uint16_t channels = r.U16();
      wav.sample_rate = static_cast<int>(r.U32());
      r.U32();
      r.U16();
      const std::uint16_t bits = r.U16();
      if (format != 1 || channels != 1 || bits != 16) {
        Fail(ErrorCode::kParse, path.string() + ": only 16-bit PCM mono is supported");
      }
      if (size > 16) r.Raw(size - 16);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) Fail(ErrorCode::kParse, path.string() + ": data before fmt chunk");
      wav.samples.resize(size / 2);
      for (auto& s : wav.samples) {
        s = static_cast<float>(static_cast<std::int16_t>(r.U16()) / 32767.0);
      }
      return wav;
    } else {
      r.Raw(size + (size & 1));
    }
  }
  Fail(ErrorCode::kParse, path.string() + ": missing data chunk");
}

}  // namespace dystts
