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

#ifndef DYSTTS_PAUSE_MODEL_H_
#define DYSTTS_PAUSE_MODEL_H_

#include <array>
#include <span>
#include <vector>

#include "dystts/corpus_io.h"
#include "dystts/phonemes.h"
#include "dystts/rng.h"

namespace dystts {

// Between-word pause statistics for one severity group.
struct SeverityPauseEntry {
  double pauses_per_utterance = 0.0;
  double slots_per_utterance = 1.0;

  // pauses / slots, clamped to [0, 1].
  double SlotProbability() const;
};

struct SeverityPauseStats {
  std::array<SeverityPauseEntry, kNumSeverities> groups;

  double SlotProbability(int severity) const;

  // Per-utterance pause rates measured on TORGO (Normal, Low, Moderate),
  // paired with the mean slot count of the calibration sentence lengths.
  static SeverityPauseStats Defaults();

  Json ToJson() const;
  static SeverityPauseStats FromJson(const Json& j);
};

inline constexpr std::array<double, kNumSeverities> kDefaultPausesPerUtterance = {0.26, 0.84,
                                                                                  2.51};

// Sentence lengths (in words) the default slot counts are calibrated on:
// uniform over [kCalibrationMinWords, kCalibrationMaxWords].
inline constexpr int kCalibrationMinWords = 2;
inline constexpr int kCalibrationMaxWords = 8;
double CalibrationMeanSlots();
int SampleCalibrationWordCount(Rng& rng);

inline constexpr double kDefaultPauseMinMs = 150.0;

struct AlignedUtterance {
  int severity = 0;
  Alignment alignment;
};

// Counts silence segments of at least pause_min_ms lying strictly between two
// words, and (n_words - 1) slots, averaged per severity group.
SeverityPauseStats EstimatePauseStats(std::span<const AlignedUtterance> corpus,
                                      double pause_min_ms = kDefaultPauseMinMs);

// Number of between-word pauses in one aligned utterance.
int CountBetweenWordPauses(const Alignment& alignment, double pause_min_ms);
int CountWords(const Alignment& alignment);

enum class PauseCountMode { kStochastic, kDeterministic };

const char* PauseCountModeName(PauseCountMode mode);
PauseCountMode ParsePauseCountMode(const std::string& name);

// Binomial(n_words - 1, p_severity) draw, or round((n_words - 1) * p) in
// deterministic mode. rng is unused in deterministic mode.
int PauseCount(int n_words, int severity, const SeverityPauseStats& stats,
               PauseCountMode mode, Rng& rng);

// Slots where a pause may be inserted: inter-word boundaries whose
// neighbours are not already PAUSE.
std::vector<std::size_t> PauseSlots(const PhonemeSequence& phones);

struct PauseInsertion {
  PhonemeSequence phones;
  // Positions of the inserted PAUSE tokens in the output sequence, ascending.
  std::vector<std::size_t> positions;
};

// Inserts k PAUSE tokens at distinct slots chosen uniformly without
// replacement.
PauseInsertion InsertPauses(const PhonemeSequence& phones, int k, Rng& rng);

}  // namespace dystts

#endif  // DYSTTS_PAUSE_MODEL_H_
