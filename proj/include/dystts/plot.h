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

#ifndef DYSTTS_PLOT_H_
#define DYSTTS_PLOT_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dystts/corpus_io.h"
#include "dystts/synth_pipeline.h"

namespace dystts {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB, row 0 at the top

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}
  void Set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
  const std::uint8_t* At(int x, int y) const {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }
};

struct PlotOptions {
  int column_width = 1;  // pixels per frame
  int row_height = 2;    // pixels per mel channel
  double pitch_axis_max = 500.0;  // Hz at the top of the left axis
};

// Heat map of log mel magnitudes, low channels at the bottom. With a report,
// overlays applied pitch (cyan, left axis), applied energy (violet, right
// axis, scaled to its maximum) and green markers at PAUSE onsets.
RgbImage RenderSpectrogram(const MelSpectrogram& mel, const SynthesisReport* report,
                           const PlotOptions& options = {});

// Panels top to bottom separated by `gap` black rows; narrower panels are
// padded on the right.
RgbImage StackPanels(const std::vector<RgbImage>& panels, int gap = 4);

std::vector<std::uint8_t> EncodePpm(const RgbImage& image);
void WritePpm(const std::filesystem::path& path, const RgbImage& image);
RgbImage ReadPpm(const std::filesystem::path& path);

}  // namespace dystts

#endif  // DYSTTS_PLOT_H_
