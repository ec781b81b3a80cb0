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

#include "dystts/phonemes.h"

#include <array>
#include <string>
#include <unordered_map>

#include "dystts/error.h"

namespace dystts {
namespace {

using PC = PhoneClass;

constexpr std::array<PhoneInfo, 40> kInventory = {{
    {"PAUSE", PC::kPause, 18, 0, 0, 0},
    {"AA", PC::kVowel, 8, 730, 1090, 2440},
    {"AE", PC::kVowel, 8, 660, 1720, 2410},
    {"AH", PC::kVowel, 6, 520, 1190, 2390},
    {"AO", PC::kVowel, 8, 570, 840, 2410},
    {"AW", PC::kVowel, 9, 680, 1200, 2400},
    {"AY", PC::kVowel, 9, 660, 1500, 2450},
    {"B", PC::kVoicedStop, 5, 300, 900, 2200},
    {"CH", PC::kAffricate, 6, 0, 0, 0},
    {"D", PC::kVoicedStop, 5, 300, 1700, 2600},
    {"DH", PC::kVoicedFricative, 4, 300, 1300, 2500},
    {"EH", PC::kVowel, 7, 530, 1840, 2480},
    {"ER", PC::kVowel, 8, 490, 1350, 1690},
    {"EY", PC::kVowel, 8, 480, 2000, 2600},
    {"F", PC::kUnvoicedFricative, 6, 0, 0, 0},
    {"G", PC::kVoicedStop, 5, 300, 1900, 2300},
    {"HH", PC::kUnvoicedFricative, 4, 0, 0, 0},
    {"IH", PC::kVowel, 6, 390, 1990, 2550},
    {"IY", PC::kVowel, 7, 270, 2290, 3010},
    {"JH", PC::kAffricate, 6, 300, 1800, 2600},
    {"K", PC::kUnvoicedStop, 5, 0, 0, 0},
    {"L", PC::kGlide, 5, 360, 1000, 2700},
    {"M", PC::kNasal, 5, 280, 1000, 2200},
    {"N", PC::kNasal, 5, 280, 1500, 2500},
    {"NG", PC::kNasal, 5, 280, 2000, 2600},
    {"OW", PC::kVowel, 8, 500, 900, 2400},
    {"OY", PC::kVowel, 10, 550, 1000, 2450},
    {"P", PC::kUnvoicedStop, 5, 0, 0, 0},
    {"R", PC::kGlide, 5, 420, 1300, 1600},
    {"S", PC::kUnvoicedFricative, 7, 0, 0, 0},
    {"SH", PC::kUnvoicedFricative, 7, 0, 0, 0},
    {"T", PC::kUnvoicedStop, 5, 0, 0, 0},
    {"TH", PC::kUnvoicedFricative, 6, 0, 0, 0},
    {"UH", PC::kVowel, 6, 440, 1020, 2240},
    {"UW", PC::kVowel, 7, 300, 870, 2240},
    {"V", PC::kVoicedFricative, 5, 300, 1100, 2400},
    {"W", PC::kGlide, 5, 300, 610, 2200},
    {"Y", PC::kGlide, 5, 280, 2250, 2900},
    {"Z", PC::kVoicedFricative, 6, 300, 1600, 2600},
    {"ZH", PC::kVoicedFricative, 6, 300, 1700, 2600},
}};

const std::unordered_map<std::string_view, int>& SymbolTable() {
  static const auto* table = [] {
    auto* t = new std::unordered_map<std::string_view, int>();
    for (int i = 0; i < static_cast<int>(kInventory.size()); ++i) {
      (*t)[kInventory[i].symbol] = i;
    }
    return t;
  }();
  return *table;
}

const std::vector<std::string>& SymbolStrings() {
  static const auto* strings = [] {
    auto* s = new std::vector<std::string>();
    for (const auto& p : kInventory) s->emplace_back(p.symbol);
    return s;
  }();
  return *strings;
}

}  // namespace

int PhonemeCount() { return static_cast<int>(kInventory.size()); }

const PhoneInfo& PhoneInfoById(int id) {
  Require(id >= 0 && id < PhonemeCount(),
          "phoneme id out of range: " + std::to_string(id));
  return kInventory[id];
}

int PhonemeId(std::string_view symbol) {
  const auto& table = SymbolTable();
  auto it = table.find(symbol);
  return it == table.end() ? -1 : it->second;
}

const std::string& PhonemeSymbol(int id) {
  Require(id >= 0 && id < PhonemeCount(),
          "phoneme id out of range: " + std::to_string(id));
  return SymbolStrings()[id];
}

bool IsVoicedClass(PhoneClass c) {
  switch (c) {
    case PC::kVowel:
    case PC::kGlide:
    case PC::kNasal:
    case PC::kVoicedStop:
    case PC::kVoicedFricative:
      return true;
    default:
      return false;
  }
}

int PhonemeSequence::WordCount() const {
  if (word_index.empty()) return 0;
  return word_index.back() + 1;
}

std::vector<std::size_t> PhonemeSequence::InterWordSlots() const {
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i + 1 < word_index.size(); ++i) {
    if (word_index[i] != word_index[i + 1]) slots.push_back(i);
  }
  return slots;
}

std::vector<int> PhonemeSequence::Ids() const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    const int id = PhonemeId(t);
    Require(id >= 0, "unknown phoneme symbol '" + t + "'");
    ids.push_back(id);
  }
  return ids;
}

std::size_t PhonemeSequence::PauseCount() const {
  std::size_t n = 0;
  for (const auto& t : tokens) n += (t == kPauseSymbol) ? 1 : 0;
  return n;
}

void ValidatePhonemeSequence(const PhonemeSequence& phones) {
  Require(phones.tokens.size() == phones.word_index.size(),
          "phoneme sequence: tokens and word_index differ in length");
  for (std::size_t i = 0; i < phones.tokens.size(); ++i) {
    Require(PhonemeId(phones.tokens[i]) >= 0,
            "phoneme sequence: unknown symbol '" + phones.tokens[i] + "'");
    if (i == 0) {
      Require(phones.word_index[0] == 0,
              "phoneme sequence: word_index must start at 0");
      continue;
    }
    const int step = phones.word_index[i] - phones.word_index[i - 1];
    Require(step == 0 || step == 1,
            "phoneme sequence: word_index must be non-decreasing without gaps");
    if (phones.tokens[i] == kPauseSymbol) {
      Require(step == 0,
              "phoneme sequence: PAUSE must carry the preceding word index");
    }
  }
}

}  // namespace dystts
