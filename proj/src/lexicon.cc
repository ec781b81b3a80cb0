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

#include "dystts/lexicon.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "dystts/error.h"

namespace dystts {
namespace {

// Small ARPAbet pronouncing dictionary, stress marks removed.
constexpr std::pair<std::string_view, std::string_view> kEntries[] = {
    {"a", "AH"},
    {"about", "AH B AW T"},
    {"after", "AE F T ER"},
    {"all", "AO L"},
    {"and", "AE N D"},
    {"any", "EH N IY"},
    {"apple", "AE P AH L"},
    {"are", "AA R"},
    {"baby", "B EY B IY"},
    {"back", "B AE K"},
    {"bad", "B AE D"},
    {"ball", "B AO L"},
    {"be", "B IY"},
    {"because", "B IH K AH Z"},
    {"bed", "B EH D"},
    {"big", "B IH G"},
    {"blue", "B L UW"},
    {"boat", "B OW T"},
    {"book", "B UH K"},
    {"boy", "B OY"},
    {"bread", "B R EH D"},
    {"bring", "B R IH NG"},
    {"brother", "B R AH DH ER"},
    {"but", "B AH T"},
    {"call", "K AO L"},
    {"can", "K AE N"},
    {"car", "K AA R"},
    {"cat", "K AE T"},
    {"chair", "CH EH R"},
    {"child", "CH AY L D"},
    {"cold", "K OW L D"},
    {"come", "K AH M"},
    {"day", "D EY"},
    {"dinner", "D IH N ER"},
    {"do", "D UW"},
    {"dog", "D AO G"},
    {"door", "D AO R"},
    {"down", "D AW N"},
    {"drink", "D R IH NG K"},
    {"eat", "IY T"},
    {"every", "EH V R IY"},
    {"father", "F AA DH ER"},
    {"find", "F AY N D"},
    {"fish", "F IH SH"},
    {"five", "F AY V"},
    {"food", "F UW D"},
    {"for", "F AO R"},
    {"friend", "F R EH N D"},
    {"from", "F R AH M"},
    {"garden", "G AA R D AH N"},
    {"give", "G IH V"},
    {"go", "G OW"},
    {"good", "G UH D"},
    {"green", "G R IY N"},
    {"happy", "HH AE P IY"},
    {"has", "HH AE Z"},
    {"have", "HH AE V"},
    {"he", "HH IY"},
    {"help", "HH EH L P"},
    {"her", "HH ER"},
    {"here", "HH IH R"},
    {"home", "HH OW M"},
    {"house", "HH AW S"},
    {"i", "AY"},
    {"in", "IH N"},
    {"is", "IH Z"},
    {"it", "IH T"},
    {"just", "JH AH S T"},
    {"keep", "K IY P"},
    {"kitchen", "K IH CH AH N"},
    {"know", "N OW"},
    {"like", "L AY K"},
    {"little", "L IH T AH L"},
    {"look", "L UH K"},
    {"made", "M EY D"},
    {"make", "M EY K"},
    {"many", "M EH N IY"},
    {"me", "M IY"},
    {"milk", "M IH L K"},
    {"money", "M AH N IY"},
    {"morning", "M AO R N IH NG"},
    {"mother", "M AH DH ER"},
    {"my", "M AY"},
    {"near", "N IH R"},
    {"need", "N IY D"},
    {"new", "N UW"},
    {"night", "N AY T"},
    {"no", "N OW"},
    {"not", "N AA T"},
    {"now", "N AW"},
    {"of", "AH V"},
    {"old", "OW L D"},
    {"on", "AA N"},
    {"one", "W AH N"},
    {"open", "OW P AH N"},
    {"our", "AW ER"},
    {"out", "AW T"},
    {"over", "OW V ER"},
    {"people", "P IY P AH L"},
    {"play", "P L EY"},
    {"please", "P L IY Z"},
    {"put", "P UH T"},
    {"rain", "R EY N"},
    {"read", "R IY D"},
    {"red", "R EH D"},
    {"right", "R AY T"},
    {"room", "R UW M"},
    {"run", "R AH N"},
    {"said", "S EH D"},
    {"school", "S K UW L"},
    {"see", "S IY"},
    {"she", "SH IY"},
    {"shoe", "SH UW"},
    {"show", "SH OW"},
    {"sister", "S IH S T ER"},
    {"sit", "S IH T"},
    {"sleep", "S L IY P"},
    {"small", "S M AO L"},
    {"some", "S AH M"},
    {"soon", "S UW N"},
    {"stop", "S T AA P"},
    {"street", "S T R IY T"},
    {"sun", "S AH N"},
    {"table", "T EY B AH L"},
    {"take", "T EY K"},
    {"talk", "T AO K"},
    {"tell", "T EH L"},
    {"thank", "TH AE NG K"},
    {"that", "DH AE T"},
    {"the", "DH AH"},
    {"there", "DH EH R"},
    {"they", "DH EY"},
    {"thing", "TH IH NG"},
    {"think", "TH IH NG K"},
    {"this", "DH IH S"},
    {"three", "TH R IY"},
    {"time", "T AY M"},
    {"to", "T UW"},
    {"today", "T AH D EY"},
    {"took", "T UH K"},
    {"tree", "T R IY"},
    {"two", "T UW"},
    {"up", "AH P"},
    {"very", "V EH R IY"},
    {"voice", "V OY S"},
    {"volleyball", "V AA L IY B AO L"},
    {"walk", "W AO K"},
    {"want", "W AA N T"},
    {"warm", "W AO R M"},
    {"was", "W AA Z"},
    {"watch", "W AA CH"},
    {"water", "W AO T ER"},
    {"we", "W IY"},
    {"went", "W EH N T"},
    {"what", "W AH T"},
    {"when", "W EH N"},
    {"where", "W EH R"},
    {"white", "W AY T"},
    {"who", "HH UW"},
    {"will", "W IH L"},
    {"window", "W IH N D OW"},
    {"with", "W IH DH"},
    {"work", "W ER K"},
    {"would", "W UH D"},
    {"yellow", "Y EH L OW"},
    {"yes", "Y EH S"},
    {"you", "Y UW"},
    {"your", "Y AO R"},
    {"zoo", "Z UW"},
};

constexpr std::string_view kLetterPhones[26] = {
    "AE", "B", "K", "D", "EH", "F", "G", "HH", "IH", "JH", "K", "L", "M",
    "N",  "AA", "P", "K", "R", "S", "T", "AH", "V", "W", "K", "Y", "Z"};

std::vector<std::string> Split(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

const std::map<std::string, std::vector<std::string>, std::less<>>& Table() {
  static const auto* table = [] {
    auto* t = new std::map<std::string, std::vector<std::string>, std::less<>>();
    for (const auto& [word, pron] : kEntries) {
      auto phones = Split(pron);
      for (const auto& p : phones) {
        if (PhonemeId(p) <= 0) {
          Fail(ErrorCode::kInvalidArgument, "lexicon: bad phone '" + p + "'");
        }
      }
      t->emplace(std::string(word), std::move(phones));
    }
    return t;
  }();
  return *table;
}

}  // namespace

std::vector<std::string> NormalizeText(std::string_view text) {
  std::vector<std::string> words;
  for (const std::string& raw : Split(text)) {
    std::string w;
    for (char c : raw) {
      const unsigned char u = static_cast<unsigned char>(c);
      if (std::isalpha(u)) {
        w.push_back(static_cast<char>(std::tolower(u)));
      } else if (c == '\'') {
        w.push_back(c);
      }
    }
    // Apostrophes only at the edges are quote marks.
    while (!w.empty() && w.front() == '\'') w.erase(w.begin());
    while (!w.empty() && w.back() == '\'') w.pop_back();
    if (!w.empty()) words.push_back(std::move(w));
  }
  return words;
}

const std::vector<std::string>* LookupWord(std::string_view word) {
  const auto& t = Table();
  auto it = t.find(word);
  return it == t.end() ? nullptr : &it->second;
}

const std::vector<std::string>& LexiconWords() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w;
    for (const auto& [word, pron] : Table()) w.push_back(word);
    return w;
  }();
  return words;
}

PhonemeSequence TextToPhonemes(std::string_view text, const LexiconOptions& options) {
  PhonemeSequence seq;
  const auto words = NormalizeText(text);
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::vector<std::string> phones;
    if (const auto* pron = LookupWord(words[w])) {
      phones = *pron;
    } else if (options.letter_fallback) {
      for (char c : words[w]) {
        if (c >= 'a' && c <= 'z') phones.emplace_back(kLetterPhones[c - 'a']);
      }
    } else {
      Fail(ErrorCode::kInvalidArgument, "word '" + words[w] + "' is not in the lexicon");
    }
    for (auto& p : phones) {
      seq.tokens.push_back(std::move(p));
      seq.word_index.push_back(static_cast<int>(w));
    }
  }
  return seq;
}

}  // namespace dystts
