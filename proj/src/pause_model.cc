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

#include "dystts/pause_model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dystts/error.h"

namespace dystts {

double SeverityPauseEntry::SlotProbability() const {
  if (slots_per_utterance <= 0.0) return 0.0;
  return std::clamp(pauses_per_utterance / slots_per_utterance, 0.0, 1.0);
}

double SeverityPauseStats::SlotProbability(int severity) const {
  Require(severity >= 0 && severity < kNumSeverities,
          "severity out of range {0,1,2}: " + std::to_string(severity));
  return groups[severity].SlotProbability();
}

double CalibrationMeanSlots() {
  return 0.5 * (kCalibrationMinWords + kCalibrationMaxWords) - 1.0;
}

int SampleCalibrationWordCount(Rng& rng) {
  return kCalibrationMinWords +
         static_cast<int>(rng.UniformInt(kCalibrationMaxWords - kCalibrationMinWords + 1));
}

SeverityPauseStats SeverityPauseStats::Defaults() {
  SeverityPauseStats s;
  for (int i = 0; i < kNumSeverities; ++i) {
    s.groups[i].pauses_per_utterance = kDefaultPausesPerUtterance[i];
    s.groups[i].slots_per_utterance = CalibrationMeanSlots();
  }
  return s;
}

Json SeverityPauseStats::ToJson() const {
  Json j = Json::object();
  for (int i = 0; i < kNumSeverities; ++i) {
    j[std::to_string(i)] = {{"pauses_per_utterance", groups[i].pauses_per_utterance},
                            {"slots_per_utterance", groups[i].slots_per_utterance}};
  }
  return j;
}

SeverityPauseStats SeverityPauseStats::FromJson(const Json& j) {
  SeverityPauseStats s;
  for (int i = 0; i < kNumSeverities; ++i) {
    const auto key = std::to_string(i);
    if (!j.contains(key)) {
      Fail(ErrorCode::kParse, "pause stats: missing severity " + key);
    }
    const Json& g = j.at(key);
    s.groups[i].pauses_per_utterance = g.at("pauses_per_utterance").get<double>();
    s.groups[i].slots_per_utterance = g.at("slots_per_utterance").get<double>();
    Require(s.groups[i].pauses_per_utterance >= 0.0,
            "pause stats: pauses_per_utterance must be >= 0");
    Require(s.groups[i].slots_per_utterance > 0.0,
            "pause stats: slots_per_utterance must be > 0");
  }
  return s;
}

int CountWords(const Alignment& alignment) {
  int words = 0;
  int last = -1;
  for (const auto& e : alignment) {
    if (e.IsSilence()) continue;
    if (e.word != last) {
      ++words;
      last = e.word;
    }
  }
  return words;
}

int CountBetweenWordPauses(const Alignment& alignment, double pause_min_ms) {
  int pauses = 0;
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    const auto& e = alignment[i];
    if (!e.IsSilence() || e.Duration() * 1000.0 < pause_min_ms) continue;
    int before = -1;
    for (std::size_t j = i; j-- > 0;) {
      if (!alignment[j].IsSilence()) {
        before = alignment[j].word;
        break;
      }
    }
    int after = -1;
    for (std::size_t j = i + 1; j < alignment.size(); ++j) {
      if (!alignment[j].IsSilence()) {
        after = alignment[j].word;
        break;
      }
    }
    if (before >= 0 && after > before) ++pauses;
  }
  return pauses;
}

SeverityPauseStats EstimatePauseStats(std::span<const AlignedUtterance> corpus,
                                      double pause_min_ms) {
  Require(pause_min_ms >= 0.0, "pause_min_ms must be >= 0");
  std::array<long, kNumSeverities> utterances{}, pauses{}, slots{};
  for (const auto& u : corpus) {
    Require(u.severity >= 0 && u.severity < kNumSeverities,
            "severity out of range {0,1,2}: " + std::to_string(u.severity));
    ++utterances[u.severity];
    pauses[u.severity] += CountBetweenWordPauses(u.alignment, pause_min_ms);
    slots[u.severity] += std::max(0, CountWords(u.alignment) - 1);
  }
  SeverityPauseStats stats;
  for (int s = 0; s < kNumSeverities; ++s) {
    if (utterances[s] == 0) {
      Fail(ErrorCode::kInvalidArgument,
           std::string("pause stats: no utterances for severity ") + SeverityName(s));
    }
    if (slots[s] == 0) {
      Fail(ErrorCode::kInvalidArgument,
           std::string("pause stats: no inter-word slots for severity ") + SeverityName(s));
    }
    const double n = static_cast<double>(utterances[s]);
    stats.groups[s].pauses_per_utterance = pauses[s] / n;
    stats.groups[s].slots_per_utterance = slots[s] / n;
  }
  return stats;
}

const char* PauseCountModeName(PauseCountMode mode) {
  return mode == PauseCountMode::kStochastic ? "stochastic" : "deterministic";
}

PauseCountMode ParsePauseCountMode(const std::string& name) {
  if (name == "stochastic") return PauseCountMode::kStochastic;
  if (name == "deterministic") return PauseCountMode::kDeterministic;
  Fail(ErrorCode::kInvalidArgument, "unknown pause mode '" + name + "'");
}

int PauseCount(int n_words, int severity, const SeverityPauseStats& stats,
               PauseCountMode mode, Rng& rng) {
  Require(n_words >= 1, "pause_count: n_words must be >= 1");
  const int slots = n_words - 1;
  const double p = stats.SlotProbability(severity);
  if (mode == PauseCountMode::kDeterministic) {
    const int k = static_cast<int>(std::lround(slots * p));
    return std::clamp(k, 0, slots);
  }
  return rng.Binomial(slots, p);
}

std::vector<std::size_t> PauseSlots(const PhonemeSequence& phones) {
  std::vector<std::size_t> slots;
  for (std::size_t i : phones.InterWordSlots()) {
    if (phones.tokens[i] == kPauseSymbol || phones.tokens[i + 1] == kPauseSymbol) continue;
    slots.push_back(i);
  }
  return slots;
}

PauseInsertion InsertPauses(const PhonemeSequence& phones, int k, Rng& rng) {
  ValidatePhonemeSequence(phones);
  std::vector<std::size_t> slots = PauseSlots(phones);
  if (k < 0 || static_cast<std::size_t>(k) > slots.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "insert_pauses: k = " + std::to_string(k) + " exceeds the " +
             std::to_string(slots.size()) + " available slots");
  }
  // Partial Fisher-Yates: the first k entries become a uniform k-subset.
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + rng.UniformInt(slots.size() - i);
    std::swap(slots[i], slots[j]);
  }
  std::vector<std::size_t> chosen(slots.begin(), slots.begin() + k);
  std::sort(chosen.begin(), chosen.end());

  PauseInsertion out;
  out.phones.tokens.reserve(phones.size() + k);
  out.phones.word_index.reserve(phones.size() + k);
  std::size_t next = 0;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    out.phones.tokens.push_back(phones.tokens[i]);
    out.phones.word_index.push_back(phones.word_index[i]);
    if (next < chosen.size() && chosen[next] == i) {
      out.positions.push_back(out.phones.tokens.size());
      out.phones.tokens.emplace_back(kPauseSymbol);
      out.phones.word_index.push_back(phones.word_index[i]);
      ++next;
    }
  }
  return out;
}

}  // namespace dystts
