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

#ifndef DYSTTS_AUGMENTATION_H_
#define DYSTTS_AUGMENTATION_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dystts/acoustic_model.h"
#include "dystts/audio.h"
#include "dystts/model_bundle.h"
#include "dystts/pause_model.h"

namespace dystts {

struct CoefficientGrid {
  std::vector<double> pitch{1.0};
  std::vector<double> energy{1.0};
  std::vector<double> duration{1.0};
  std::vector<int> severity{0};
  bool pause_insertion = false;
  PauseCountMode pause_mode = PauseCountMode::kStochastic;

  void Validate() const;
  // Number of combinations.
  std::size_t size() const;
  // Combination `index`, enumerated pitch-major with severity varying
  // fastest. The seed is left at 0.
  SynthesisControls Combination(std::size_t index) const;

  Json ToJson() const;
  static CoefficientGrid FromJson(const Json& j);
  bool operator==(const CoefficientGrid&) const = default;
};

enum class GridPreset { kExp1, kExp2 };

CoefficientGrid BuildGrid(GridPreset preset);
// "exp1" or "exp2".
CoefficientGrid BuildGrid(const std::string& preset);

struct PlanEntry {
  std::string utterance_id;
  std::size_t combination = 0;
  SynthesisControls controls;
  std::string output_id;
};

struct AugmentationPlan {
  CoefficientGrid grid;
  int multiplier = 1;
  std::uint64_t base_seed = 0;
  std::vector<PlanEntry> entries;  // corpus order, ascending combination within an utterance

  Json ToJson() const;
};

// Per utterance, `multiplier` distinct grid combinations drawn uniformly
// without replacement with a generator keyed by (base_seed, utterance id).
AugmentationPlan SamplePlan(const CoefficientGrid& grid, std::span<const Utterance> corpus,
                            int multiplier, std::uint64_t base_seed);

struct RunOptions {
  FrameParams features;
  bool write_wav = false;
  int griffin_lim_iters = 60;
};

struct EntryFailure {
  std::string output_id;
  std::string message;
};

struct RunResult {
  std::vector<Utterance> manifest;  // originals then synthetic records
  std::vector<EntryFailure> failures;
  bool partial() const { return !failures.empty(); }
};

// Synthesizes every entry into out_dir (mel/, report/, optional wav/) and
// writes out_dir/manifest.jsonl and out_dir/failures.json. Original records
// keep their files; their paths are rewritten relative to out_dir.
RunResult RunPlan(const AugmentationPlan& plan, std::span<const Utterance> corpus,
                  const std::filesystem::path& corpus_manifest, ModelBundle& bundle,
                  const SeverityPauseStats& pause_stats, const std::filesystem::path& out_dir,
                  const RunOptions& options = {});

}  // namespace dystts

#endif  // DYSTTS_AUGMENTATION_H_
