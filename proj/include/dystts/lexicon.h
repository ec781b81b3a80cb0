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

#ifndef DYSTTS_LEXICON_H_
#define DYSTTS_LEXICON_H_

#include <string>
#include <string_view>
#include <vector>

#include "dystts/phonemes.h"

namespace dystts {

struct LexiconOptions {
  // Spell out words missing from the lexicon letter by letter instead of failing.
  bool letter_fallback = false;
};

// Lowercased words with everything except letters and apostrophes removed.
std::vector<std::string> NormalizeText(std::string_view text);

// Pronunciation of one normalized word, or nullptr when unknown.
const std::vector<std::string>* LookupWord(std::string_view word);

// Every word in the built-in lexicon, sorted.
const std::vector<std::string>& LexiconWords();

PhonemeSequence TextToPhonemes(std::string_view text, const LexiconOptions& options = {});

}  // namespace dystts

#endif  // DYSTTS_LEXICON_H_
