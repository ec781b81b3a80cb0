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

#include <cmath>

#include "dystts/error.h"
#include "dystts/rng.h"

namespace dystts {

Json SynthesisReport::ToJson() const {
  Json j;
  j["speaker"] = speaker;
  j["controls"] = controls.ToJson();
  j["phones"] = phones.tokens;
  j["word_index"] = phones.word_index;
  j["inserted_pauses"] = inserted_pauses;
  j["predicted_duration"] = variance.predicted_duration;
  j["scaled_duration"] = variance.scaled_duration;
  j["durations"] = variance.durations;
  j["prosody_level"] = variance.frame_level_prosody ? "frame" : "phoneme";
  j["predicted_pitch"] = variance.predicted_pitch;
  j["applied_pitch"] = variance.applied_pitch;
  j["predicted_energy"] = variance.predicted_energy;
  j["applied_energy"] = variance.applied_energy;
  j["total_frames"] = total_frames;
  return j;
}

SynthesisReport SynthesisReport::FromJson(const Json& j) {
  SynthesisReport r;
  try {
    r.speaker = j.at("speaker").get<std::string>();
    r.controls = SynthesisControls::FromJson(j.at("controls"));
    r.phones.tokens = j.at("phones").get<std::vector<std::string>>();
    r.phones.word_index = j.at("word_index").get<std::vector<int>>();
    r.inserted_pauses = j.at("inserted_pauses").get<std::vector<std::size_t>>();
    r.variance.predicted_duration = j.at("predicted_duration").get<std::vector<double>>();
    r.variance.scaled_duration = j.at("scaled_duration").get<std::vector<double>>();
    r.variance.durations = j.at("durations").get<std::vector<int>>();
    r.variance.frame_level_prosody = j.at("prosody_level").get<std::string>() == "frame";
    r.variance.predicted_pitch = j.at("predicted_pitch").get<std::vector<double>>();
    r.variance.applied_pitch = j.at("applied_pitch").get<std::vector<double>>();
    r.variance.predicted_energy = j.at("predicted_energy").get<std::vector<double>>();
    r.variance.applied_energy = j.at("applied_energy").get<std::vector<double>>();
    r.total_frames = j.at("total_frames").get<std::size_t>();
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, std::string("synthesis report: ") + e.what());
  }
  ValidatePhonemeSequence(r.phones);
  Require(r.variance.durations.size() == r.phones.size(),
          "synthesis report: durations do not match phones");
  return r;
}

SynthesisResult Synthesize(ModelBundle& bundle, const PhonemeSequence& phones,
                           const std::string& speaker, const SynthesisControls& controls,
                           const SeverityPauseStats& pause_stats) {
  controls.Validate();
  Require(!phones.empty(), "synthesize: empty phoneme sequence");
  ValidatePhonemeSequence(phones);
  SynthesisResult result;
  SynthesisReport& report = result.report;
  report.speaker = speaker;
  report.controls = controls;

  ModelInput input;
  input.speaker = bundle.SpeakerIndex(speaker);
  input.severity = controls.severity;
  AcousticModel<float>& model = *bundle.model;
  nn::NoGradGuard no_grad;
  Predictions<float> pred;
  try {
    if (controls.pause_insertion) {
      Rng rng(controls.seed);
      const int slots = static_cast<int>(PauseSlots(phones).size());
      const int drawn = PauseCount(phones.WordCount(), controls.severity, pause_stats,
                                   controls.pause_mode, rng);
      PauseInsertion ins = InsertPauses(phones, std::min(slots, drawn), rng);
      report.phones = std::move(ins.phones);
      report.inserted_pauses = std::move(ins.positions);
      input.phone_ids = report.phones.Ids();
      pred = model.InferWithInsertedPauses(input, report.inserted_pauses, controls);
    } else {
      report.phones = phones;
      input.phone_ids = phones.Ids();
      const Example ex{input, nullptr, nullptr};
      const Batch<float> batch = model.MakeBatch(std::span(&ex, 1), false);
      pred = model.Forward(batch, std::span(&controls, 1), RunMode::kInference);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyOutput) throw;
    Fail(ErrorCode::kEmptyOutput,
         "synthesize: every duration rounded to 0 for " + std::to_string(input.phone_ids.size()) +
             " phones at duration_coef " + std::to_string(controls.duration_coef));
  }
  report.variance = pred.adaptor.reports.at(0);
  report.total_frames = pred.adaptor.frame_layout.lengths.at(0);

  const nn::Tensor<float>& m = pred.mel.value();
  result.mel = MelSpectrogram(report.total_frames, m.cols());
  for (std::size_t t = 0; t < report.total_frames; ++t) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const float v = m.at(t, c);
      if (!std::isfinite(v)) Fail(ErrorCode::kNumeric, "synthesize: non-finite mel output");
      result.mel.at(t, c) = v;
    }
  }
  return result;
}

}  // namespace dystts
