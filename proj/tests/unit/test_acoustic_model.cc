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


#include "dystts/acoustic_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dystts/nn/ops.h"
#include "dystts/phonemes.h"
#include "dystts/rng.h"
#include "dystts/trainer.h"
#include "test_util.h"

namespace dystts {
namespace {

using nn::SeqLayout;
using nn::Tensor;
using nn::Var;
using testing::TinyConfig;

// One utterance with synthetic targets and a matching random mel.
struct Sample {
  ModelInput input;
  ProsodyTargets targets;
  MelSpectrogram mel;

  Example AsExample() const { return Example{input, &targets, &mel}; }
};

Sample MakeSample(Rng& rng, std::size_t n_phones, int speaker = 0, int severity = 0) {
  Sample s;
  s.input.speaker = speaker;
  s.input.severity = severity;
  const int n_ids = PhonemeCount();
  for (std::size_t i = 0; i < n_phones; ++i) {
    s.input.phone_ids.push_back(1 + static_cast<int>(rng.UniformInt(n_ids - 1)));
    const int d = 1 + static_cast<int>(rng.UniformInt(5));
    s.targets.durations.push_back(d);
    const double hz = rng.Bernoulli(0.8) ? 120.0 + 80.0 * rng.Uniform() : 0.0;
    const double e = 0.1 * rng.Uniform();
    s.targets.pitch.push_back(hz);
    s.targets.energy.push_back(e);
    for (int k = 0; k < d; ++k) {
      s.targets.frame_pitch.push_back(hz);
      s.targets.frame_energy.push_back(e);
    }
  }
  s.mel = MelSpectrogram(s.targets.TotalFrames(), kNumMels);
  for (float& v : s.mel.data) v = static_cast<float>(rng.Normal());
  return s;
}

std::vector<SynthesisControls> Controls(std::size_t n, SynthesisControls c = {}) {
  return std::vector<SynthesisControls>(n, c);
}

template <typename T>
Predictions<T> RunModel(AcousticModel<T>& model, const std::vector<Example>& examples, RunMode mode,
                   const std::vector<SynthesisControls>& controls = {}) {
  nn::NoGradGuard no_grad;
  const bool targets = mode != RunMode::kInference;
  Batch<T> batch = model.MakeBatch(examples, targets);
  std::vector<SynthesisControls> c = controls.empty() ? Controls(examples.size()) : controls;
  return model.Forward(batch, c, mode);
}

TEST(LengthRegulateTest, ExpandsEachRowByItsDuration) {
  Tensor<double> h({3, 2}, std::vector<double>{1, 1, 2, 2, 3, 3});
  SeqLayout src = SeqLayout::FromLengths({3});
  SeqLayout frames;
  Var<double> out = LengthRegulate(Var<double>::Constant(h), src, {{2, 3, 1}}, &frames);
  ASSERT_EQ(frames.rows(), 6u);
  const double want[] = {1, 1, 2, 2, 2, 3};
  for (std::size_t r = 0; r < 6; ++r) {
    EXPECT_EQ(out.value().at(r, 0), want[r]);
    EXPECT_EQ(out.value().at(r, 1), want[r]);
  }
}

TEST(LengthRegulateTest, RandomCasesMatchNaiveExpansion) {
  Rng rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t batch = 1 + rng.UniformInt(3);
    std::vector<std::size_t> lengths;
    for (std::size_t b = 0; b < batch; ++b) lengths.push_back(1 + rng.UniformInt(6));
    SeqLayout src = SeqLayout::FromLengths(lengths);
    Tensor<double> h = Tensor<double>::Matrix2D(src.rows(), 2);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = static_cast<double>(i);
    std::vector<std::vector<int>> d(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t i = 0; i < lengths[b]; ++i) {
        d[b].push_back(static_cast<int>(rng.UniformInt(4)));
      }
      if (std::accumulate(d[b].begin(), d[b].end(), 0) == 0) d[b][0] = 1;
    }
    SeqLayout frames;
    Var<double> out = LengthRegulate(Var<double>::Constant(h), src, d, &frames);
    for (std::size_t b = 0; b < batch; ++b) {
      std::vector<double> naive;
      for (std::size_t i = 0; i < lengths[b]; ++i) {
        for (int k = 0; k < d[b][i]; ++k) naive.push_back(h.at(b * src.max_len + i, 0));
      }
      ASSERT_EQ(frames.lengths[b], naive.size());
      for (std::size_t t = 0; t < naive.size(); ++t) {
        ASSERT_EQ(out.value().at(b * frames.max_len + t, 0), naive[t]);
      }
      for (std::size_t t = naive.size(); t < frames.max_len; ++t) {
        ASSERT_EQ(out.value().at(b * frames.max_len + t, 0), 0.0);
      }
    }
  }
}

TEST(LengthRegulateTest, AllZeroDurationsAreAnEmptyOutput) {
  Tensor<double> h({2, 1}, std::vector<double>{1, 2});
  SeqLayout frames;
  EXPECT_ERROR_CODE(LengthRegulate(Var<double>::Constant(h), SeqLayout::FromLengths({2}),
                                   {{0, 0}}, &frames),
                    ErrorCode::kEmptyOutput);
}

TEST(LengthRegulateTest, NegativeDurationIsRejected) {
  Tensor<double> h({1, 1}, std::vector<double>{1});
  SeqLayout frames;
  EXPECT_ERROR_CODE(
      LengthRegulate(Var<double>::Constant(h), SeqLayout::FromLengths({1}), {{-1}}, &frames),
      ErrorCode::kInvalidArgument);
}

TEST(ModelConfigTest, JsonRoundTrip) {
  ModelConfig c = TinyConfig(3);
  c.masking_mode = MaskingMode::kFrame;
  c.predictor_dropout = 0.25;
  EXPECT_EQ(ModelConfig::FromJson(c.ToJson()), c);
  EXPECT_EQ(ModelConfig::FromJson(Json::object()), ModelConfig{});
}

TEST(ModelConfigTest, RejectsBadValues) {
  Json j = ModelConfig{}.ToJson();
  j["hiden"] = 3;
  EXPECT_ERROR_CODE(ModelConfig::FromJson(j), ErrorCode::kInvalidArgument);
  ModelConfig c = TinyConfig();
  c.n_heads = 3;
  EXPECT_ERROR_CODE(c.Validate(), ErrorCode::kInvalidArgument);
  c = TinyConfig();
  c.ff_conv_kernel = 4;
  EXPECT_ERROR_CODE(c.Validate(), ErrorCode::kInvalidArgument);
  c = TinyConfig();
  c.n_mels = 64;
  EXPECT_ERROR_CODE(c.Validate(), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(ParseMaskingMode("word"), ErrorCode::kInvalidArgument);
}

TEST(SynthesisControlsTest, RangeAndRoundTrip) {
  SynthesisControls c;
  c.pitch_coef = 0.0;
  c.duration_coef = 2.0;
  c.severity = 2;
  c.pause_insertion = true;
  c.pause_mode = PauseCountMode::kDeterministic;
  c.seed = 99;
  c.Validate();
  EXPECT_EQ(SynthesisControls::FromJson(c.ToJson()), c);
  c.energy_coef = 2.5;
  EXPECT_ERROR_CODE(c.Validate(), ErrorCode::kInvalidArgument);
  c.energy_coef = -0.1;
  EXPECT_ERROR_CODE(c.Validate(), ErrorCode::kInvalidArgument);
  c.energy_coef = 1.0;
  c.severity = 3;
  EXPECT_ERROR_CODE(c.Validate(), ErrorCode::kInvalidArgument);
}

TEST(AcousticModelTest, ShapesFollowTheBatch) {
  AcousticModel<float> model(TinyConfig(), 1);
  Rng rng(2);
  Sample a = MakeSample(rng, 5), b = MakeSample(rng, 9, 1, 2);
  Predictions<float> p = RunModel(model, {a.AsExample(), b.AsExample()}, RunMode::kTeacherForced);
  const std::size_t fmax = std::max(a.targets.TotalFrames(), b.targets.TotalFrames());
  EXPECT_EQ(p.mel.rows(), 2 * fmax);
  EXPECT_EQ(p.mel.cols(), static_cast<std::size_t>(kNumMels));
  EXPECT_EQ(p.adaptor.log_duration.rows(), 2 * 9u);
  EXPECT_EQ(p.adaptor.pitch.rows(), 2 * 9u);
  EXPECT_EQ(p.adaptor.severity_logits.rows(), 2u);
  EXPECT_EQ(p.adaptor.severity_logits.cols(), 3u);
  EXPECT_EQ(p.adaptor.frame_layout.lengths[0], a.targets.TotalFrames());
  EXPECT_EQ(p.adaptor.frame_layout.lengths[1], b.targets.TotalFrames());
}

TEST(AcousticModelTest, FrameModePredictsPerFrame) {
  ModelConfig c = TinyConfig();
  c.masking_mode = MaskingMode::kFrame;
  AcousticModel<float> frame_model(c, 1);
  AcousticModel<float> phone_model(TinyConfig(), 1);
  Rng rng(2);
  Sample a = MakeSample(rng, 6);
  Predictions<float> pf = RunModel(frame_model, {a.AsExample()}, RunMode::kTeacherForced);
  Predictions<float> pp = RunModel(phone_model, {a.AsExample()}, RunMode::kTeacherForced);
  EXPECT_EQ(pf.adaptor.pitch.rows(), a.targets.TotalFrames());
  EXPECT_EQ(pp.adaptor.pitch.rows(), 6u);
  EXPECT_EQ(pf.mel.rows(), pp.mel.rows());
}

TEST(AcousticModelTest, SpeakerShiftsEncoderOutputByEmbeddingDifference) {
  AcousticModel<double> model(TinyConfig(), 5);
  Rng rng(3);
  Sample s0 = MakeSample(rng, 7, 0);
  Sample s1 = s0;
  s1.input.speaker = 1;
  nn::NoGradGuard no_grad;
  std::vector<Example> e0{s0.AsExample()}, e1{s1.AsExample()};
  Var<double> h0 = model.Encode(model.MakeBatch(e0, false), RunMode::kInference);
  Var<double> h1 = model.Encode(model.MakeBatch(e1, false), RunMode::kInference);
  const Tensor<double>& table = model.speaker_embedding().table().value();
  for (std::size_t r = 0; r < 7; ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      EXPECT_NEAR(h1.value().at(r, c) - h0.value().at(r, c), table.at(1, c) - table.at(0, c),
                  1e-12);
    }
  }
}

TEST(AcousticModelTest, DroppingTheSpeakerRemovesTheEmbedding) {
  AcousticModel<double> model(TinyConfig(), 5);
  Rng rng(3);
  Sample s = MakeSample(rng, 4, 1);
  Sample none = s;
  none.input.use_speaker = false;
  nn::NoGradGuard no_grad;
  std::vector<Example> e{s.AsExample()}, en{none.AsExample()};
  Var<double> h = model.Encode(model.MakeBatch(e, false), RunMode::kInference);
  Var<double> hn = model.Encode(model.MakeBatch(en, false), RunMode::kInference);
  const Tensor<double>& table = model.speaker_embedding().table().value();
  for (std::size_t c = 0; c < table.cols(); ++c) {
    EXPECT_NEAR(h.value().at(0, c) - hn.value().at(0, c), table.at(1, c), 1e-12);
  }
}

template <typename T>
void ExpectBatchingInvariant(double tol) {
  AcousticModel<T> model(TinyConfig(), 8);
  Rng rng(4);
  Sample a = MakeSample(rng, 4), b = MakeSample(rng, 11, 1, 1), c = MakeSample(rng, 7, 0, 2);
  for (RunMode mode : {RunMode::kTeacherForced, RunMode::kInference}) {
    Predictions<T> alone = RunModel(model, {a.AsExample()}, mode);
    Predictions<T> batched = RunModel(model, {b.AsExample(), a.AsExample(), c.AsExample()}, mode);
    const SeqLayout& la = alone.adaptor.frame_layout;
    const SeqLayout& lb = batched.adaptor.frame_layout;
    ASSERT_EQ(la.lengths[0], lb.lengths[1]);
    for (std::size_t t = 0; t < la.lengths[0]; ++t) {
      for (int m = 0; m < kNumMels; ++m) {
        ASSERT_NEAR(alone.mel.value().at(t, m), batched.mel.value().at(lb.max_len + t, m), tol);
      }
    }
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(alone.adaptor.severity_logits.value().at(0, k),
                  batched.adaptor.severity_logits.value().at(1, k), tol);
    }
  }
}

TEST(AcousticModelTest, PaddingDoesNotLeakIntoOtherUtterancesFloat) {
  ExpectBatchingInvariant<float>(1e-5);
}

TEST(AcousticModelTest, PaddingDoesNotLeakIntoOtherUtterancesDouble) {
  ExpectBatchingInvariant<double>(1e-10);
}

TEST(AcousticModelTest, InferenceIsDeterministic) {
  AcousticModel<float> model(TinyConfig(), 8);
  Rng rng(4);
  Sample a = MakeSample(rng, 6);
  Predictions<float> p1 = RunModel(model, {a.AsExample()}, RunMode::kInference);
  Predictions<float> p2 = RunModel(model, {a.AsExample()}, RunMode::kInference);
  EXPECT_EQ(p1.mel.value().storage(), p2.mel.value().storage());
}

TEST(AcousticModelTest, CoefficientsScaleTheReport) {
  AcousticModel<double> model(TinyConfig(), 9);
  NormStats ns;
  ns.pitch_mean = 150.0;
  ns.pitch_std = 30.0;
  ns.energy_mean = 0.05;
  ns.energy_std = 0.02;
  model.set_norm_stats(ns);
  Rng rng(5);
  Sample a = MakeSample(rng, 8);
  SynthesisControls base;
  SynthesisControls scaled;
  scaled.duration_coef = 2.0;
  scaled.pitch_coef = 0.0;
  scaled.energy_coef = 0.5;
  const VarianceReport r1 =
      RunModel(model, {a.AsExample()}, RunMode::kInference, Controls(1, base)).adaptor.reports[0];
  const VarianceReport r2 =
      RunModel(model, {a.AsExample()}, RunMode::kInference, Controls(1, scaled)).adaptor.reports[0];
  ASSERT_EQ(r1.predicted_duration.size(), 8u);
  EXPECT_EQ(r1.predicted_duration, r2.predicted_duration);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(r1.scaled_duration[i], r1.predicted_duration[i]);
    EXPECT_DOUBLE_EQ(r2.scaled_duration[i], 2.0 * r1.predicted_duration[i]);
    EXPECT_EQ(r2.durations[i], std::max(1, static_cast<int>(std::lround(r2.scaled_duration[i]))));
    EXPECT_GE(r1.predicted_duration[i], 0.0);
  }
  for (std::size_t i = 0; i < r2.applied_pitch.size(); ++i) {
    EXPECT_EQ(r2.applied_pitch[i], 0.0);
    EXPECT_DOUBLE_EQ(r2.applied_energy[i], 0.5 * r2.predicted_energy[i]);
    EXPECT_DOUBLE_EQ(r1.applied_pitch[i], r1.predicted_pitch[i]);
    EXPECT_GE(r1.predicted_pitch[i], 0.0);
  }
}

TEST(AcousticModelTest, ZeroDurationCoefficientKeepsOneFramePerPhoneme) {
  AcousticModel<float> model(TinyConfig(), 9);
  Rng rng(5);
  Sample a = MakeSample(rng, 5);
  SynthesisControls c;
  c.duration_coef = 0.0;
  Predictions<float> p = RunModel(model, {a.AsExample()}, RunMode::kInference, Controls(1, c));
  EXPECT_EQ(p.adaptor.frame_layout.lengths[0], 5u);
}

TEST(AcousticModelTest, ZeroSeverityEmbeddingMakesSeverityIrrelevant) {
  AcousticModel<float> model(TinyConfig(), 10);
  auto& table = model.severity_embedding().table().mutable_value();
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = 0.0f;
  Rng rng(6);
  Sample a = MakeSample(rng, 6);
  std::vector<std::vector<float>> mels;
  for (int s = 0; s < 3; ++s) {
    Sample v = a;
    v.input.severity = s;
    SynthesisControls c;
    c.severity = s;
    mels.push_back(RunModel(model, {v.AsExample()}, RunMode::kInference, Controls(1, c))
                       .mel.value().storage());
  }
  EXPECT_EQ(mels[0], mels[1]);
  EXPECT_EQ(mels[0], mels[2]);
}

TEST(AcousticModelTest, SeverityChangesOutputWhenEmbeddingIsNonZero) {
  AcousticModel<float> model(TinyConfig(), 10);
  Rng rng(6);
  Sample a = MakeSample(rng, 6);
  Sample b = a;
  b.input.severity = 2;
  Predictions<float> pa = RunModel(model, {a.AsExample()}, RunMode::kTeacherForced);
  Predictions<float> pb = RunModel(model, {b.AsExample()}, RunMode::kTeacherForced);
  EXPECT_NE(pa.mel.value().storage(), pb.mel.value().storage());
}

TEST(AcousticModelTest, TeacherForcingFollowsTargetDurations) {
  AcousticModel<float> model(TinyConfig(), 12);
  Rng rng(7);
  Sample a = MakeSample(rng, 9);
  Predictions<float> p = RunModel(model, {a.AsExample()}, RunMode::kTeacherForced);
  EXPECT_EQ(p.adaptor.durations[0], a.targets.durations);
  EXPECT_EQ(p.mel.rows(), a.targets.TotalFrames());
}

TEST(AcousticModelTest, BatchErrors) {
  AcousticModel<float> model(TinyConfig(), 12);
  Rng rng(7);
  Sample a = MakeSample(rng, 3);
  Example no_targets{a.input, nullptr, nullptr};
  std::vector<Example> e{no_targets};
  EXPECT_ERROR_CODE(model.MakeBatch(e, true), ErrorCode::kInvalidArgument);
  Sample bad = a;
  bad.input.speaker = 5;
  e = {bad.AsExample()};
  EXPECT_ERROR_CODE(model.MakeBatch(e, false), ErrorCode::kInvalidArgument);
  bad = a;
  bad.input.phone_ids.clear();
  e = {bad.AsExample()};
  EXPECT_ERROR_CODE(model.MakeBatch(e, false), ErrorCode::kInvalidArgument);
  bad = a;
  bad.targets.durations = {0, 0, 0};
  e = {bad.AsExample()};
  EXPECT_ERROR_CODE(model.MakeBatch(e, true), ErrorCode::kInvalidArgument);
  bad = a;
  bad.mel = MelSpectrogram(a.mel.n_frames + 1, kNumMels);
  e = {bad.AsExample()};
  EXPECT_ERROR_CODE(model.MakeBatch(e, true), ErrorCode::kInvalidArgument);
}

TEST(LossTest, DurationLossIsMeanSquaredLogError) {
  Tensor<double> pred({2, 1}, std::vector<double>{0.5, 1.0});
  Tensor<double> target({2, 1}, std::vector<double>{0.0, 1.0});
  const std::vector<double> w{1.0, 1.0};
  Var<double> l = nn::MaskedMse(Var<double>::Constant(pred), target, std::span<const double>(w));
  EXPECT_DOUBLE_EQ(l.value()[0], 0.125);
}

TEST(LossTest, PerfectPredictionsGiveZeroRegressionLoss) {
  AcousticModel<double> model(TinyConfig(), 13);
  Rng rng(8);
  Sample a = MakeSample(rng, 5), b = MakeSample(rng, 8, 1, 1);
  std::vector<Example> e{a.AsExample(), b.AsExample()};
  Batch<double> batch = model.MakeBatch(e, true);
  Predictions<double> p = model.Forward(batch, Controls(2), RunMode::kTeacherForced);
  p.mel = Var<double>::Constant(batch.mel_target);
  p.adaptor.log_duration = Var<double>::Constant(batch.log_duration_target);
  p.adaptor.pitch = Var<double>::Constant(batch.pitch_target);
  p.adaptor.energy = Var<double>::Constant(batch.energy_target);
  LossComponents<double> l = model.Loss(p, batch, LossWeights{});
  EXPECT_EQ(l.mel.value()[0], 0.0);
  EXPECT_EQ(l.duration.value()[0], 0.0);
  EXPECT_EQ(l.pitch.value()[0], 0.0);
  EXPECT_EQ(l.energy.value()[0], 0.0);
  EXPECT_GT(l.severity.value()[0], 0.0);
  EXPECT_DOUBLE_EQ(l.total.value()[0], l.severity.value()[0]);
}

TEST(LossTest, DurationComponentMatchesIndependentComputation) {
  AcousticModel<double> model(TinyConfig(), 13);
  Rng rng(8);
  Sample a = MakeSample(rng, 6);
  std::vector<Example> e{a.AsExample()};
  Batch<double> batch = model.MakeBatch(e, true);
  Predictions<double> p = model.Forward(batch, Controls(1), RunMode::kTeacherForced);
  LossComponents<double> l = model.Loss(p, batch, LossWeights{});
  double sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double diff = p.adaptor.log_duration.value()[i] - std::log1p(a.targets.durations[i]);
    sum += diff * diff;
  }
  EXPECT_NEAR(l.duration.value()[0], sum / 6.0, 1e-12);
}

TEST(LossTest, PaddingContentIsIgnored) {
  AcousticModel<double> model(TinyConfig(), 14);
  Rng rng(9);
  Sample a = MakeSample(rng, 3), b = MakeSample(rng, 10, 1, 2);
  std::vector<Example> e{a.AsExample(), b.AsExample()};
  Batch<double> batch = model.MakeBatch(e, true);
  Predictions<double> p = model.Forward(batch, Controls(2), RunMode::kTeacherForced);
  LossComponents<double> clean = model.Loss(p, batch, LossWeights{});
  Batch<double> dirty = batch;
  for (std::size_t r = 0; r < dirty.src.rows(); ++r) {
    if (dirty.src.Valid(r)) continue;
    dirty.log_duration_target[r] = 1e3;
    dirty.pitch_target[r] = -1e3;
    dirty.energy_target[r] = 7e2;
  }
  for (std::size_t r = 0; r < dirty.frames.rows(); ++r) {
    if (dirty.frames.Valid(r)) continue;
    for (int m = 0; m < kNumMels; ++m) dirty.mel_target.at(r, m) = 5e2;
  }
  LossComponents<double> noisy = model.Loss(p, dirty, LossWeights{});
  EXPECT_EQ(clean.mel.value()[0], noisy.mel.value()[0]);
  EXPECT_EQ(clean.duration.value()[0], noisy.duration.value()[0]);
  EXPECT_EQ(clean.pitch.value()[0], noisy.pitch.value()[0]);
  EXPECT_EQ(clean.energy.value()[0], noisy.energy.value()[0]);
  EXPECT_EQ(clean.total.value()[0], noisy.total.value()[0]);
}

TEST(LossTest, WeightsScaleComponents) {
  AcousticModel<double> model(TinyConfig(), 15);
  Rng rng(9);
  Sample a = MakeSample(rng, 4);
  std::vector<Example> e{a.AsExample()};
  Batch<double> batch = model.MakeBatch(e, true);
  Predictions<double> p = model.Forward(batch, Controls(1), RunMode::kTeacherForced);
  LossWeights w;
  w.mel = 2.0;
  w.duration = 0.0;
  w.pitch = 0.5;
  w.energy = 1.0;
  w.severity = 3.0;
  LossComponents<double> l = model.Loss(p, batch, w);
  const double want = 2.0 * l.mel.value()[0] + 0.5 * l.pitch.value()[0] +
                      l.energy.value()[0] + 3.0 * l.severity.value()[0];
  EXPECT_NEAR(l.total.value()[0], want, 1e-12);
  LossWeights bad;
  bad.mel = -1.0;
  EXPECT_ERROR_CODE(LossWeights::FromJson(bad.ToJson()), ErrorCode::kInvalidArgument);
}

TEST(PauseSpliceTest, InsertedPausesLeaveOtherDurationsUnchanged) {
  AcousticModel<float> model(TinyConfig(), 16);
  Rng rng(10);
  Sample a = MakeSample(rng, 8);
  SynthesisControls c;
  c.duration_coef = 1.3;
  const VarianceReport plain =
      RunModel(model, {a.AsExample()}, RunMode::kInference, Controls(1, c)).adaptor.reports[0];

  ModelInput spliced = a.input;
  spliced.phone_ids.insert(spliced.phone_ids.begin() + 3, kPauseId);
  spliced.phone_ids.insert(spliced.phone_ids.begin() + 7, kPauseId);
  const std::vector<std::size_t> inserted{3, 7};
  Predictions<float> p;
  {
    nn::NoGradGuard no_grad;
    p = model.InferWithInsertedPauses(spliced, inserted, c);
  }
  const VarianceReport& r = p.adaptor.reports[0];
  ASSERT_EQ(r.durations.size(), 10u);
  std::vector<int> kept;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < r.durations.size(); ++i) {
    frames += r.durations[i];
    if (i != 3 && i != 7) kept.push_back(r.durations[i]);
    if (i == 3 || i == 7) EXPECT_GE(r.durations[i], 0);
  }
  EXPECT_EQ(kept, plain.durations);
  EXPECT_EQ(p.adaptor.frame_layout.lengths[0], frames);
  EXPECT_EQ(p.mel.rows(), frames);
}

TEST(PauseSpliceTest, InsertedPositionMustHoldAPause) {
  AcousticModel<float> model(TinyConfig(), 16);
  Rng rng(10);
  Sample a = MakeSample(rng, 4);
  const std::vector<std::size_t> inserted{1};
  EXPECT_ERROR_CODE(model.InferWithInsertedPauses(a.input, inserted, SynthesisControls{}),
                    ErrorCode::kInvalidArgument);
}

TEST(ModelGradCheckTest, TinyModelGradientsMatchFiniteDifferences) {
  ModelConfig c = TinyConfig();
  c.hidden = 8;
  c.ff_filter = 16;
  ModelGradCheckOptions options;
  options.check.eps = 1e-5;
  nn::GradCheckResult r = ModelGradCheck(c, options);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_parameter << "[" << r.worst_index << "]";
  EXPECT_GT(r.entries_checked, 1000u);
}

TEST(ModelGradCheckTest, FrameModeGradientsMatchFiniteDifferences) {
  ModelConfig c = TinyConfig();
  c.hidden = 8;
  c.ff_filter = 16;
  c.masking_mode = MaskingMode::kFrame;
  ModelGradCheckOptions options;
  options.check.eps = 1e-5;
  options.check.max_entries_per_parameter = 8;
  nn::GradCheckResult r = ModelGradCheck(c, options);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_parameter << "[" << r.worst_index << "]";
}

}  // namespace
}  // namespace dystts
