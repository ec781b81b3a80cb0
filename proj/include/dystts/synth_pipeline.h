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

#ifndef DYSTTS_SYNTH_PIPELINE_H_
#define DYSTTS_SYNTH_PIPELINE_H_

#include <string>
#include <vector>

#include "dystts/acoustic_model.h"
#include "dystts/model_bundle.h"
#include "dystts/pause_model.h"

namespace dystts {

struct SynthesisReport {
  std::string speaker;
  SynthesisControls controls;
  PhonemeSequence phones;                // after pause insertion
  std::vector<std::size_t> inserted_pauses;
  VarianceReport variance;
  std::size_t total_frames = 0;

  Json ToJson() const;
  static SynthesisReport FromJson(const Json& j);
};

struct SynthesisResult {
  MelSpectrogram mel;
  SynthesisReport report;
};

// Pause insertion (when enabled, seeded by controls.seed), then the acoustic
// model. Fails with kEmptyOutput when every duration rounds to 0.
SynthesisResult Synthesize(ModelBundle& bundle, const PhonemeSequence& phones,
                           const std::string& speaker, const SynthesisControls& controls,
                           const SeverityPauseStats& pause_stats);

}  // namespace dystts

#endif  // DYSTTS_SYNTH_PIPELINE_H_
