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

#ifndef DYSTTS_PHONEMES_H_
#define DYSTTS_PHONEMES_H_

#include <string>
#include <string_view>
#include <vector>

namespace dystts {

// Closed ARPAbet inventory plus the reserved PAUSE token (id 0).
inline constexpr std::string_view kPauseSymbol = "PAUSE";
// Alignment files mark silences with this symbol.
inline constexpr std::string_view kSilenceSymbol = "sp";
inline constexpr int kPauseId = 0;

enum class PhoneClass {
  kPause,
  kVowel,
  kGlide,  // liquids and glides
  kNasal,
  kVoicedStop,
  kUnvoicedStop,
  kVoicedFricative,
  kUnvoicedFricative,
  kAffricate,
};

struct PhoneInfo {
  std::string_view symbol;
  PhoneClass phone_class;
  double base_frames;  // typical duration at normal rate, in 16 ms frames
  double f1, f2, f3;   // formant targets (Hz) for voiced rendering
};

int PhonemeCount();
const PhoneInfo& PhoneInfoById(int id);
// Returns -1 when the symbol is not in the inventory.
int PhonemeId(std::string_view symbol);
const std::string& PhonemeSymbol(int id);
bool IsVoicedClass(PhoneClass c);

// Phoneme tokens with the index of the word each token belongs to.
// PAUSE tokens carry the word index of the preceding token.
struct PhonemeSequence {
  std::vector<std::string> tokens;
  std::vector<int> word_index;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  int WordCount() const;
  // Positions i where word_index[i] != word_index[i + 1].
  std::vector<std::size_t> InterWordSlots() const;
  std::vector<int> Ids() const;  // throws on unknown symbols
  std::size_t PauseCount() const;

  bool operator==(const PhonemeSequence&) const = default;
};

// Throws kInvalidArgument when the sequence violates its invariants.
void ValidatePhonemeSequence(const PhonemeSequence& phones);

}  // namespace dystts

#endif  // DYSTTS_PHONEMES_H_
