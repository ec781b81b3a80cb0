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

#include "dystts/plot.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dystts/error.h"

namespace dystts {
namespace {

using Rgb = std::array<double, 3>;

constexpr Rgb kStops[] = {
    {0, 0, 4}, {40, 11, 84}, {101, 21, 110}, {159, 42, 99}, {212, 72, 66}, {245, 125, 21},
    {250, 193, 39}, {252, 255, 164},
};

Rgb HeatColor(double v) {
  constexpr int n = static_cast<int>(std::size(kStops)) - 1;
  v = std::clamp(v, 0.0, 1.0) * n;
  const int i = std::min(n - 1, static_cast<int>(v));
  const double f = v - i;
  Rgb c;
  for (int k = 0; k < 3; ++k) c[k] = kStops[i][k] + f * (kStops[i + 1][k] - kStops[i][k]);
  return c;
}

// Per-frame values of a report vector that is per phoneme or per frame.
std::vector<double> PerFrame(const std::vector<double>& values, const SynthesisReport& report) {
  if (report.variance.frame_level_prosody) return values;
  std::vector<double> out;
  for (std::size_t i = 0; i < values.size() && i < report.variance.durations.size(); ++i) {
    out.insert(out.end(), report.variance.durations[i], values[i]);
  }
  return out;
}

void DrawCurve(RgbImage& img, const std::vector<double>& values, double axis_max, int col_w,
               Rgb color, bool skip_zero) {
  if (axis_max <= 0.0) return;
  int prev_y = -1;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (skip_zero && values[t] <= 0.0) {
      prev_y = -1;
      continue;
    }
    const double frac = std::clamp(values[t] / axis_max, 0.0, 1.0);
    const int y = static_cast<int>(std::lround((1.0 - frac) * (img.height - 1)));
    const int lo = prev_y < 0 ? y : std::min(y, prev_y);
    const int hi = prev_y < 0 ? y : std::max(y, prev_y);
    for (int x = static_cast<int>(t) * col_w; x < static_cast<int>(t + 1) * col_w; ++x) {
      for (int yy = lo; yy <= hi; ++yy) {
        img.Set(x, yy, static_cast<std::uint8_t>(color[0]), static_cast<std::uint8_t>(color[1]),
                static_cast<std::uint8_t>(color[2]));
      }
    }
    prev_y = y;
  }
}

}  // namespace

void RgbImage::Set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  std::uint8_t* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  p[0] = r;
  p[1] = g;
  p[2] = b;
}

RgbImage RenderSpectrogram(const MelSpectrogram& mel, const SynthesisReport* report,
                           const PlotOptions& options) {
  if (mel.n_frames == 0) Fail(ErrorCode::kInvalidArgument, "plot: mel has no frames");
  Require(options.column_width >= 1 && options.row_height >= 1, "plot: bad pixel scale");
  if (report != nullptr) {
    Require(report->total_frames == mel.n_frames,
            "plot: report covers " + std::to_string(report->total_frames) +
                " frames but the mel has " + std::to_string(mel.n_frames));
  }
  const int cw = options.column_width, rh = options.row_height;
  RgbImage img(static_cast<int>(mel.n_frames) * cw, static_cast<int>(mel.n_mels) * rh);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> logs(mel.data.size());
  for (std::size_t i = 0; i < mel.data.size(); ++i) {
    logs[i] = std::log10(std::max(0.0, static_cast<double>(mel.data[i])) + 1e-5);
    lo = std::min(lo, logs[i]);
    hi = std::max(hi, logs[i]);
  }
  const double range = hi > lo ? hi - lo : 1.0;
  for (std::size_t t = 0; t < mel.n_frames; ++t) {
    for (std::size_t c = 0; c < mel.n_mels; ++c) {
      const Rgb col = HeatColor((logs[t * mel.n_mels + c] - lo) / range);
      const int y0 = static_cast<int>(mel.n_mels - 1 - c) * rh;
      for (int dx = 0; dx < cw; ++dx) {
        for (int dy = 0; dy < rh; ++dy) {
          img.Set(static_cast<int>(t) * cw + dx, y0 + dy, static_cast<std::uint8_t>(col[0]),
                  static_cast<std::uint8_t>(col[1]), static_cast<std::uint8_t>(col[2]));
        }
      }
    }
  }
  if (report == nullptr) return img;

  int frame = 0;
  for (std::size_t i = 0; i < report->phones.size(); ++i) {
    if (report->phones.tokens[i] == kPauseSymbol && report->variance.durations[i] > 0) {
      for (int y = 0; y < img.height; ++y) img.Set(frame * cw, y, 40, 220, 60);
    }
    frame += report->variance.durations[i];
  }
  const auto energy = PerFrame(report->variance.applied_energy, *report);
  const double energy_max = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  DrawCurve(img, energy, energy_max, cw, {190, 120, 255}, false);
  DrawCurve(img, PerFrame(report->variance.applied_pitch, *report), options.pitch_axis_max, cw,
            {0, 255, 255}, true);
  return img;
}

RgbImage StackPanels(const std::vector<RgbImage>& panels, int gap) {
  Require(!panels.empty(), "plot: no panels");
  int width = 0, height = 0;
  for (const auto& p : panels) {
    width = std::max(width, p.width);
    height += p.height;
  }
  height += gap * static_cast<int>(panels.size() - 1);
  RgbImage out(width, height);
  int y0 = 0;
  for (const auto& p : panels) {
    for (int y = 0; y < p.height; ++y) {
      std::copy_n(&p.pixels[static_cast<std::size_t>(y) * p.width * 3],
                  static_cast<std::size_t>(p.width) * 3,
                  &out.pixels[(static_cast<std::size_t>(y0 + y) * width) * 3]);
    }
    y0 += p.height + gap;
  }
  return out;
}

std::vector<std::uint8_t> EncodePpm(const RgbImage& image) {
  const std::string header =
      "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), image.pixels.begin(), image.pixels.end());
  return bytes;
}

void WritePpm(const std::filesystem::path& path, const RgbImage& image) {
  WriteFileBytes(path, EncodePpm(image));
}

RgbImage ReadPpm(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos]))
      t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  if (token() != "P6") Fail(ErrorCode::kParse, path.string() + ": not a binary PPM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    Fail(ErrorCode::kParse, path.string() + ": bad PPM header");
  }
  if (maxval != 255 || w <= 0 || h <= 0)
    Fail(ErrorCode::kParse, path.string() + ": unsupported PPM");
  ++pos;
  RgbImage img(w, h);
  if (bytes.size() - pos != img.pixels.size())
    Fail(ErrorCode::kParse, path.string() + ": truncated PPM");
  std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), img.pixels.begin());
  return img;
}

}  // namespace dystts
