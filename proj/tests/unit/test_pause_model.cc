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

#include <map>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"

namespace dystts {
namespace {

// n_words words of two phones each, optionally separated by silences of
// `gap` seconds at the chosen boundaries.
Alignment Sentence(int n_words, const std::set<int>& pauses_after, double gap = 0.2) {
  Alignment a;
  double t = 0.0;
  for (int w = 0; w < n_words; ++w) {
    a.push_back({"B", t, t + 0.05, w});
    a.push_back({"AE", t + 0.05, t + 0.15, w});
    t += 0.15;
    if (pauses_after.count(w)) {
      a.push_back({"sp", t, t + gap, w});
      t += gap;
    }
  }
  return a;
}

PhonemeSequence Words(int n_words) {
  PhonemeSequence p;
  for (int w = 0; w < n_words; ++w) {
    p.tokens.insert(p.tokens.end(), {"B", "AE"});
    p.word_index.insert(p.word_index.end(), {w, w});
  }
  return p;
}

TEST(PauseStatsTest, CountsQualifyingPausesPerGroup) {
  std::vector<AlignedUtterance> corpus;
  for (int s = 0; s < 2; ++s) corpus.push_back({s, Sentence(3, {})});
  // 10 five-word utterances at severity 2 with 8 pauses in total.
  for (int u = 0; u < 10; ++u) {
    std::set<int> after;
    if (u < 4) after = {0, 2};
    corpus.push_back({2, Sentence(5, after)});
  }
  const SeverityPauseStats s = EstimatePauseStats(corpus, 150.0);
  EXPECT_DOUBLE_EQ(s.groups[2].pauses_per_utterance, 0.8);
  EXPECT_DOUBLE_EQ(s.groups[2].slots_per_utterance, 4.0);
  EXPECT_DOUBLE_EQ(s.SlotProbability(2), 0.2);
}

TEST(PauseStatsTest, ShortSilencesAndEdgeSilencesDoNotCount) {
  Alignment a = Sentence(3, {0}, 0.1);  // below the 150 ms threshold
  EXPECT_EQ(CountBetweenWordPauses(a, 150.0), 0);
  EXPECT_EQ(CountBetweenWordPauses(a, 100.0), 1);
  Alignment b = Sentence(2, {1}, 0.5);  // trailing silence
  EXPECT_EQ(CountBetweenWordPauses(b, 150.0), 0);
}

TEST(PauseStatsTest, NoSilencesMeansNoPauses) {
  std::vector<AlignedUtterance> corpus;
  for (int s = 0; s < 3; ++s) corpus.push_back({s, Sentence(4, {})});
  const SeverityPauseStats st = EstimatePauseStats(corpus);
  for (const auto& g : st.groups) EXPECT_EQ(g.pauses_per_utterance, 0.0);
}

TEST(PauseStatsTest, SingleWordGroupIsAnError) {
  std::vector<AlignedUtterance> corpus = {{0, Sentence(3, {})}, {1, Sentence(3, {})},
                                          {2, Sentence(1, {})}};
  EXPECT_THROW(EstimatePauseStats(corpus), Error);
}

TEST(PauseStatsTest, EmptyGroupIsAnError) {
  std::vector<AlignedUtterance> corpus = {{0, Sentence(3, {})}, {1, Sentence(3, {})}};
  EXPECT_THROW(EstimatePauseStats(corpus), Error);
}

TEST(PauseStatsTest, DefaultsAndRatios) {
  const SeverityPauseStats s = SeverityPauseStats::Defaults();
  EXPECT_EQ(s.groups[0].pauses_per_utterance, 0.26);
  EXPECT_EQ(s.groups[1].pauses_per_utterance, 0.84);
  EXPECT_EQ(s.groups[2].pauses_per_utterance, 2.51);
  EXPECT_NEAR(0.84 / 0.26, 3.23, 0.01);
  EXPECT_NEAR(2.51 / 0.26, 9.65, 0.01);
  EXPECT_LE(s.SlotProbability(0), s.SlotProbability(1));
  EXPECT_LE(s.SlotProbability(1), s.SlotProbability(2));
  for (int i = 0; i < 3; ++i) {
    EXPECT_GE(s.SlotProbability(i), 0.0);
    EXPECT_LE(s.SlotProbability(i), 1.0);
  }
}

TEST(PauseStatsTest, JsonRoundTripIsExact) {
  SeverityPauseStats s;
  s.groups[0] = {0.1 + 0.2, 3.7};
  s.groups[1] = {1.0 / 3.0, 4.25};
  s.groups[2] = {2.51, 4.0};
  const auto back = SeverityPauseStats::FromJson(Json::parse(s.ToJson().dump()));
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.groups[i].pauses_per_utterance, s.groups[i].pauses_per_utterance);
    EXPECT_EQ(back.groups[i].slots_per_utterance, s.groups[i].slots_per_utterance);
  }
  EXPECT_EQ(back.ToJson().dump(), s.ToJson().dump());
}

TEST(PauseCountTest, SingleWordNeverPauses) {
  Rng rng(1);
  const auto stats = SeverityPauseStats::Defaults();
  for (int s = 0; s < 3; ++s) {
    EXPECT_EQ(PauseCount(1, s, stats, PauseCountMode::kDeterministic, rng), 0);
    for (int i = 0; i < 100; ++i) {
      EXPECT_EQ(PauseCount(1, s, stats, PauseCountMode::kStochastic, rng), 0);
    }
  }
}

TEST(PauseCountTest, DeterministicRounds) {
  SeverityPauseStats stats;
  stats.groups[1] = {2.0, 4.0};  // p = 0.5
  Rng rng(1);
  EXPECT_EQ(PauseCount(5, 1, stats, PauseCountMode::kDeterministic, rng), 2);
}

TEST(PauseCountTest, StochasticMeanMatchesBinomial) {
  SeverityPauseStats stats;
  stats.groups[0] = {1.5, 6.0};  // p = 0.25
  Rng rng(123);
  const int draws = 100000;
  long total = 0;
  for (int i = 0; i < draws; ++i) {
    const int k = PauseCount(7, 0, stats, PauseCountMode::kStochastic, rng);
    ASSERT_GE(k, 0);
    ASSERT_LE(k, 6);
    total += k;
  }
  EXPECT_NEAR(static_cast<double>(total) / draws, 6 * 0.25, 0.02);
}

TEST(PauseCountTest, HigherSeverityIsStochasticallyLarger) {
  const auto stats = SeverityPauseStats::Defaults();
  const int draws = 20000;
  std::array<std::array<int, 8>, 3> hist{};
  for (int s = 0; s < 3; ++s) {
    Rng rng(77 + s);
    for (int i = 0; i < draws; ++i) {
      ++hist[s][PauseCount(8, s, stats, PauseCountMode::kStochastic, rng)];
    }
  }
  // Survival functions are ordered at every threshold (with sampling slack).
  for (int s = 0; s + 1 < 3; ++s) {
    int lo = 0, hi = 0;
    for (int k = 7; k >= 1; --k) {
      lo += hist[s][k];
      hi += hist[s + 1][k];
      EXPECT_LE(lo, hi + draws / 100) << "severity " << s << " k " << k;
    }
  }
}

TEST(InsertPausesTest, ZeroIsIdentity) {
  Rng rng(3);
  const auto p = Words(4);
  const auto out = InsertPauses(p, 0, rng);
  EXPECT_EQ(out.phones, p);
  EXPECT_TRUE(out.positions.empty());
}

TEST(InsertPausesTest, AllSlotsFilled) {
  Rng rng(3);
  const auto out = InsertPauses(Words(4), 3, rng);
  const std::vector<std::string> expected = {"B", "AE", "PAUSE", "B", "AE", "PAUSE",
                                             "B", "AE", "PAUSE", "B", "AE"};
  EXPECT_EQ(out.phones.tokens, expected);
  EXPECT_EQ(out.phones.word_index, std::vector<int>({0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3}));
  EXPECT_EQ(out.positions, std::vector<std::size_t>({2, 5, 8}));
}

TEST(InsertPausesTest, TooManyIsAnError) {
  Rng rng(3);
  EXPECT_THROW(InsertPauses(Words(3), 3, rng), Error);
}

TEST(InsertPausesTest, PairsAreUniform) {
  Rng rng(2024);
  const auto p = Words(5);  // 4 slots
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[InsertPauses(p, 2, rng).positions];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [pair, n] : counts) {
    EXPECT_NEAR(static_cast<double>(n) / draws, 1.0 / 6.0, 0.01);
  }
}

TEST(InsertPausesTest, NeverAtEdgesNorAdjacentToPause) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    PhonemeSequence p = Words(2 + static_cast<int>(rng.UniformInt(6)));
    const int existing = static_cast<int>(rng.UniformInt(PauseSlots(p).size() + 1));
    p = InsertPauses(p, existing, rng).phones;
    const int k = static_cast<int>(rng.UniformInt(PauseSlots(p).size() + 1));
    const auto out = InsertPauses(p, k, rng);
    const auto& t = out.phones.tokens;
    ASSERT_EQ(t.size(), p.size() + k);
    EXPECT_NE(t.front(), "PAUSE");
    EXPECT_NE(t.back(), "PAUSE");
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      EXPECT_FALSE(t[i] == "PAUSE" && t[i + 1] == "PAUSE");
    }
    for (std::size_t pos : out.positions) {
      ASSERT_EQ(t[pos], "PAUSE");
      EXPECT_EQ(out.phones.word_index[pos], out.phones.word_index[pos - 1]);
    }
    ValidatePhonemeSequence(out.phones);
  }
}

TEST(PauseCalibrationTest, DefaultsReproducePerUtteranceRates) {
  const auto stats = SeverityPauseStats::Defaults();
  const int n = 100000;
  for (int s = 0; s < 3; ++s) {
    Rng rng(StableHash(1, "calibration", s));
    long total = 0;
    for (int i = 0; i < n; ++i) {
      total += PauseCount(SampleCalibrationWordCount(rng), s, stats, PauseCountMode::kStochastic,
                          rng);
    }
    const double mean = static_cast<double>(total) / n;
    EXPECT_NEAR(mean, kDefaultPausesPerUtterance[s], 0.05 * kDefaultPausesPerUtterance[s]);
  }
}

TEST(PauseModeTest, NamesRoundTrip) {
  for (auto m : {PauseCountMode::kStochastic, PauseCountMode::kDeterministic}) {
    EXPECT_EQ(ParsePauseCountMode(PauseCountModeName(m)), m);
  }
  EXPECT_THROW(ParsePauseCountMode("sometimes"), Error);
}

}  // namespace
}  // namespace dystts
