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

#ifndef DYSTTS_TOY_CORPUS_H_
#define DYSTTS_TOY_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dystts/audio.h"
#include "dystts/corpus_io.h"

namespace dystts {

// Procedural stand-in for a dysarthric speech corpus. Every severity group
// has its own speakers; speaker slot j of every group reads the same prompts,
// so severity effects are not confounded with sentence content.
struct ToyCorpusSpec {
  int n_speakers_per_severity = 2;
  int n_utterances_per_speaker = 10;
  int min_words = 2;
  int max_words = 8;
  std::array<double, kNumSeverities> severity_duration_multipliers = {1.0, 1.3, 1.8};
  // Per inter-word slot.
  std::array<double, kNumSeverities> severity_pause_rates = {0.06, 0.2, 0.6};
  std::uint64_t base_seed = 0;

  void Validate() const;
  Json ToJson() const;
  static ToyCorpusSpec FromJson(const Json& j);
};

// Generative parameters of one toy speaker.
struct ToySpeaker {
  std::string id;
  int severity = 0;
  double base_f0 = 120.0;      // Hz
  double formant_scale = 1.0;
  double gain = 1.0;
};

struct ToyUtterance {
  Utterance utterance;
  Alignment alignment;
  std::vector<int> durations;   // frames per phone, PAUSE included
  std::vector<float> audio;     // empty unless rendered
  MelSpectrogram mel;           // empty unless rendered
};

std::vector<ToySpeaker> ToySpeakers(const ToyCorpusSpec& spec);

// Utterance k of `speaker` (0-based slot `slot` within its severity group).
ToyUtterance BuildToyUtterance(const ToyCorpusSpec& spec, const FrameParams& params,
                               const ToySpeaker& speaker, int slot, int k, bool render);

// Writes manifest.jsonl, align/, wav/ and mel/ under out_dir and returns the
// manifest records (paths relative to out_dir).
std::vector<Utterance> GenerateToyCorpus(const ToyCorpusSpec& spec, const FrameParams& params,
                                         const std::filesystem::path& out_dir);

inline constexpr const char* kManifestName = "manifest.jsonl";

}  // namespace dystts

#endif  // DYSTTS_TOY_CORPUS_H_
