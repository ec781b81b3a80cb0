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


#include "dystts/synth_pipeline.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dystts/audio.h"
#include "dystts/lexicon.h"
#include "dystts/plot.h"
#include "dystts/prosody_features.h"
#include "dystts/vocoder.h"
#include "test_util.h"

namespace dystts {
namespace {

using testing::TempDir;
using testing::TinyConfig;

// An untrained bundle whose duration predictor always outputs log(1 + frames).
ModelBundle FixedDurationBundle(double frames) {
  ModelBundle b;
  b.speakers = {"A", "B"};
  b.model = std::make_unique<AcousticModel<float>>(TinyConfig(2), 21);
  auto& ps = b.model->parameters();
  auto& w = ps.Find("adaptor.duration.linear.weight")->var.mutable_value();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.0f;
  ps.Find("adaptor.duration.linear.bias")->var.mutable_value()[0] =
      static_cast<float>(std::log1p(frames));
  return b;
}

PhonemeSequence Phones(const std::string& text) { return TextToPhonemes(text); }

const SeverityPauseStats kStats = SeverityPauseStats::Defaults();

TEST(SynthesizeTest, SameInputsGiveIdenticalOutput) {
  ModelBundle b = FixedDurationBundle(4);
  SynthesisControls c;
  c.severity = 2;
  c.pause_insertion = true;
  c.seed = 17;
  const PhonemeSequence p = Phones("the cat and the dog are here");
  SynthesisResult r1 = Synthesize(b, p, "A", c, kStats);
  SynthesisResult r2 = Synthesize(b, p, "A", c, kStats);
  EXPECT_EQ(r1.mel.data, r2.mel.data);
  EXPECT_EQ(r1.report.ToJson(), r2.report.ToJson());
}

TEST(SynthesizeTest, DurationCoefficientScalesTotalFrames) {
  ModelBundle b = FixedDurationBundle(8);
  const PhonemeSequence p = Phones("about all");
  SynthesisControls base, slow;
  slow.duration_coef = 1.6;
  const std::size_t n1 = Synthesize(b, p, "A", base, kStats).report.total_frames;
  const std::size_t n2 = Synthesize(b, p, "A", slow, kStats).report.total_frames;
  EXPECT_EQ(n1, 8 * p.size());
  const double ratio = static_cast<double>(n2) / static_cast<double>(n1);
  EXPECT_GE(ratio, 1.45);
  EXPECT_LE(ratio, 1.75);
}

TEST(SynthesizeTest, FramesEqualTheSumOfDurations) {
  ModelBundle b = FixedDurationBundle(3.3);
  SynthesisControls c;
  c.duration_coef = 0.7;
  c.pitch_coef = 1.2;
  SynthesisResult r = Synthesize(b, Phones("the cat"), "B", c, kStats);
  const auto& d = r.report.variance.durations;
  EXPECT_EQ(r.report.total_frames,
            static_cast<std::size_t>(std::accumulate(d.begin(), d.end(), 0)));
  EXPECT_EQ(r.mel.n_frames, r.report.total_frames);
  EXPECT_EQ(r.mel.n_mels, static_cast<std::size_t>(kNumMels));
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.report.variance.scaled_duration[i],
                     0.7 * r.report.variance.predicted_duration[i]);
    EXPECT_EQ(d[i], std::max(1, static_cast<int>(std::lround(
                                    r.report.variance.scaled_duration[i]))));
  }
  for (std::size_t i = 0; i < r.report.variance.applied_pitch.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.report.variance.applied_pitch[i],
                     1.2 * r.report.variance.predicted_pitch[i]);
  }
}

TEST(SynthesizeTest, SingleWordNeverGetsPauses) {
  ModelBundle b = FixedDurationBundle(4);
  SynthesisControls c;
  c.severity = 2;
  c.pause_insertion = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    c.seed = seed;
    SynthesisResult r = Synthesize(b, Phones("about"), "A", c, kStats);
    EXPECT_TRUE(r.report.inserted_pauses.empty());
    EXPECT_EQ(r.report.phones.PauseCount(), 0u);
  }
}

TEST(SynthesizeTest, PausesLandBetweenWordsAndKeepOtherDurations) {
  ModelBundle b = FixedDurationBundle(5);
  const PhonemeSequence p = Phones("the cat and the dog are here now");
  SynthesisControls off;
  off.severity = 2;
  off.duration_coef = 1.2;
  SynthesisControls on = off;
  on.pause_insertion = true;
  on.pause_mode = PauseCountMode::kDeterministic;
  SynthesisResult plain = Synthesize(b, p, "A", off, kStats);
  SynthesisResult paused = Synthesize(b, p, "A", on, kStats);
  ASSERT_FALSE(paused.report.inserted_pauses.empty());
  const auto& phones = paused.report.phones;
  std::vector<int> kept;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    const bool inserted = std::count(paused.report.inserted_pauses.begin(),
                                     paused.report.inserted_pauses.end(), i) > 0;
    if (inserted) {
      EXPECT_EQ(phones.tokens[i], kPauseSymbol);
      ASSERT_GT(i, 0u);
      ASSERT_LT(i + 1, phones.size());
      EXPECT_NE(phones.word_index[i], phones.word_index[i + 1]);
      EXPECT_NE(phones.tokens[i - 1], kPauseSymbol);
    } else {
      kept.push_back(paused.report.variance.durations[i]);
    }
  }
  EXPECT_EQ(kept, plain.report.variance.durations);
}

TEST(SynthesizeTest, Errors) {
  ModelBundle b = FixedDurationBundle(4);
  EXPECT_ERROR_CODE(Synthesize(b, Phones("the cat"), "Z", {}, kStats),
                    ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(Synthesize(b, PhonemeSequence{}, "A", {}, kStats),
                    ErrorCode::kInvalidArgument);
  SynthesisControls c;
  c.pitch_coef = 3.0;
  EXPECT_ERROR_CODE(Synthesize(b, Phones("the cat"), "A", c, kStats),
                    ErrorCode::kInvalidArgument);
}

TEST(SynthesizeTest, AllPauseInputWithZeroDurationIsEmpty) {
  ModelBundle b = FixedDurationBundle(0.0);
  b.model->parameters().Find("adaptor.duration.linear.bias")->var.mutable_value()[0] = -5.0f;
  PhonemeSequence p{{std::string(kPauseSymbol)}, {0}};
  EXPECT_ERROR_CODE(Synthesize(b, p, "A", {}, kStats), ErrorCode::kEmptyOutput);
  // Ordinary phonemes keep one frame each.
  EXPECT_EQ(Synthesize(b, Phones("the"), "A", {}, kStats).report.total_frames,
            Phones("the").size());
}

TEST(SynthesisReportTest, JsonRoundTrip) {
  ModelBundle b = FixedDurationBundle(4);
  SynthesisControls c;
  c.pause_insertion = true;
  c.severity = 1;
  c.seed = 4;
  SynthesisResult r = Synthesize(b, Phones("the cat and the dog"), "B", c, kStats);
  const Json j = r.report.ToJson();
  EXPECT_EQ(SynthesisReport::FromJson(j).ToJson(), j);
  Json bad = j;
  bad["durations"] = Json::array({1});
  EXPECT_ERROR_CODE(SynthesisReport::FromJson(bad), ErrorCode::kInvalidArgument);
  bad = j;
  bad.erase("controls");
  EXPECT_ERROR_CODE(SynthesisReport::FromJson(bad), ErrorCode::kParse);
}

TEST(LexiconTest, LooksUpNormalizedWords) {
  EXPECT_EQ(NormalizeText("About, ALL!"), (std::vector<std::string>{"about", "all"}));
  PhonemeSequence p = TextToPhonemes("About, ALL!");
  EXPECT_EQ(p.tokens, (std::vector<std::string>{"AH", "B", "AW", "T", "AO", "L"}));
  EXPECT_EQ(p.word_index, (std::vector<int>{0, 0, 0, 0, 1, 1}));
  EXPECT_TRUE(std::is_sorted(LexiconWords().begin(), LexiconWords().end()));
  for (const std::string& w : LexiconWords()) {
    const auto* pron = LookupWord(w);
    ASSERT_NE(pron, nullptr);
    for (const std::string& ph : *pron) EXPECT_GE(PhonemeId(ph), 1) << w;
  }
}

TEST(LexiconTest, UnknownWordsFailUnlessSpelledOut) {
  EXPECT_ERROR_CODE(TextToPhonemes("zyxw"), ErrorCode::kInvalidArgument);
  LexiconOptions o;
  o.letter_fallback = true;
  PhonemeSequence p = TextToPhonemes("the zyx", o);
  EXPECT_EQ(p.WordCount(), 2);
  EXPECT_EQ(p.tokens.back(), "K");
}

FrameParams Params() { return FrameParams{}; }

TEST(GriffinLimTest, OutputLengthFollowsTheFrameCount) {
  MelSpectrogram mel(12, kNumMels);
  for (float& v : mel.data) v = 0.1f;
  GriffinLimOptions o;
  o.n_iters = 4;
  const auto y = GriffinLim(mel, Params(), o);
  EXPECT_EQ(y.size(), static_cast<std::size_t>((12 - 1) * 256 + 1024));
  for (float s : y) {
    EXPECT_LE(std::abs(s), 1.0f);
    EXPECT_TRUE(std::isfinite(s));
  }
}

TEST(GriffinLimTest, ZeroMelIsSilence) {
  MelSpectrogram mel(8, kNumMels);
  for (float s : GriffinLim(mel, Params())) EXPECT_EQ(s, 0.0f);
}

TEST(GriffinLimTest, RecoversTheFundamentalOfASine) {
  const FrameParams fp = Params();
  std::vector<float> x(fp.sample_rate / 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 0.5f * static_cast<float>(std::sin(2.0 * M_PI * 300.0 * i / fp.sample_rate));
  }
  const auto y = GriffinLim(ComputeMel(x, fp), fp);
  const std::vector<double> f0 = ExtractF0(y, fp);
  std::vector<double> voiced;
  for (std::size_t t = 3; t + 3 < f0.size(); ++t) {
    if (f0[t] > 0.0) voiced.push_back(f0[t]);
  }
  ASSERT_GT(voiced.size(), f0.size() / 2);
  std::nth_element(voiced.begin(), voiced.begin() + voiced.size() / 2, voiced.end());
  EXPECT_NEAR(voiced[voiced.size() / 2], 300.0, 10.0);
}

TEST(GriffinLimTest, IsDeterministicForAFixedSeed) {
  MelSpectrogram mel(6, kNumMels);
  Rng rng(3);
  for (float& v : mel.data) v = static_cast<float>(rng.Uniform());
  GriffinLimOptions o;
  o.n_iters = 5;
  EXPECT_EQ(GriffinLim(mel, Params(), o), GriffinLim(mel, Params(), o));
}

TEST(PlotTest, OneColumnPerFrame) {
  MelSpectrogram mel(10, kNumMels);
  for (std::size_t i = 0; i < mel.data.size(); ++i) mel.data[i] = static_cast<float>(i % 7);
  RgbImage img = RenderSpectrogram(mel, nullptr);
  EXPECT_EQ(img.width, 10);
  EXPECT_EQ(img.height, 2 * kNumMels);
  PlotOptions o;
  o.column_width = 3;
  EXPECT_EQ(RenderSpectrogram(mel, nullptr, o).width, 30);
}

TEST(PlotTest, RejectsEmptyAndMismatchedInputs) {
  EXPECT_ERROR_CODE(RenderSpectrogram(MelSpectrogram(0, kNumMels), nullptr),
                    ErrorCode::kInvalidArgument);
  SynthesisReport r;
  r.total_frames = 4;
  EXPECT_ERROR_CODE(RenderSpectrogram(MelSpectrogram(5, kNumMels), &r),
                    ErrorCode::kInvalidArgument);
}

TEST(PlotTest, ReportOverlayAndPpmRoundTrip) {
  ModelBundle b = FixedDurationBundle(3);
  SynthesisControls c;
  c.pause_insertion = true;
  c.pause_mode = PauseCountMode::kDeterministic;
  c.severity = 2;
  SynthesisResult r = Synthesize(b, Phones("the cat and the dog are here"), "A", c, kStats);
  RgbImage with = RenderSpectrogram(r.mel, &r.report);
  RgbImage without = RenderSpectrogram(r.mel, nullptr);
  EXPECT_EQ(with.width, static_cast<int>(r.report.total_frames));
  EXPECT_NE(with.pixels, without.pixels);
  RgbImage stacked = StackPanels({with, without}, 4);
  EXPECT_EQ(stacked.height, with.height * 2 + 4);
  TempDir dir;
  WritePpm(dir / "p.ppm", stacked);
  RgbImage back = ReadPpm(dir / "p.ppm");
  EXPECT_EQ(back.width, stacked.width);
  EXPECT_EQ(back.pixels, stacked.pixels);
}

}  // namespace
}  // namespace dystts
