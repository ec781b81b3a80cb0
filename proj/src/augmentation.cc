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

#include "dystts/augmentation.h"

#include <algorithm>
#include <cstdio>
#include <map>

#include "dystts/error.h"
#include "dystts/rng.h"
#include "dystts/synth_pipeline.h"
#include "dystts/vocoder.h"

namespace dystts {

void CoefficientGrid::Validate() const {
  auto check = [](const std::vector<double>& values, const char* name) {
    Require(!values.empty(), std::string("grid: ") + name + " list is empty");
    for (double v : values) {
      if (!(v >= kMinCoefficient && v <= kMaxCoefficient)) {
        Fail(ErrorCode::kInvalidArgument,
             std::string("grid: ") + name + " value " + std::to_string(v) + " outside [0, 2]");
      }
    }
  };
  check(pitch, "pitch");
  check(energy, "energy");
  check(duration, "duration");
  Require(!severity.empty(), "grid: severity list is empty");
  for (int s : severity) {
    Require(s >= 0 && s < kNumSeverities,
            "grid: severity " + std::to_string(s) + " not in {0,1,2}");
  }
}

std::size_t CoefficientGrid::size() const {
  return pitch.size() * energy.size() * duration.size() * severity.size();
}

SynthesisControls CoefficientGrid::Combination(std::size_t index) const {
  Require(index < size(), "grid: combination index out of range");
  SynthesisControls c;
  c.severity = severity[index % severity.size()];
  index /= severity.size();
  c.duration_coef = duration[index % duration.size()];
  index /= duration.size();
  c.energy_coef = energy[index % energy.size()];
  index /= energy.size();
  c.pitch_coef = pitch[index];
  c.pause_insertion = pause_insertion;
  c.pause_mode = pause_mode;
  return c;
}

Json CoefficientGrid::ToJson() const {
  Json j;
  j["pitch"] = pitch;
  j["energy"] = energy;
  j["duration"] = duration;
  j["severity"] = severity;
  j["pause_insertion"] = pause_insertion;
  j["pause_mode"] = PauseCountModeName(pause_mode);
  return j;
}

CoefficientGrid CoefficientGrid::FromJson(const Json& j) {
  Require(j.is_object(), "grid: expected a JSON object");
  CoefficientGrid g;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "pitch") {
        g.pitch = value.get<std::vector<double>>();
      } else if (key == "energy") {
        g.energy = value.get<std::vector<double>>();
      } else if (key == "duration") {
        g.duration = value.get<std::vector<double>>();
      } else if (key == "severity") {
        g.severity = value.get<std::vector<int>>();
      } else if (key == "pause_insertion") {
        g.pause_insertion = value.get<bool>();
      } else if (key == "pause_mode") {
        g.pause_mode = ParsePauseCountMode(value.get<std::string>());
      } else {
        Fail(ErrorCode::kInvalidArgument, "grid: unknown key '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("grid: ") + e.what());
  }
  g.Validate();
  return g;
}

CoefficientGrid BuildGrid(GridPreset preset) {
  CoefficientGrid g;
  g.severity = {0, 1, 2};
  g.pause_insertion = true;
  if (preset == GridPreset::kExp2) {
    g.pitch = {0.1, 0.6, 1.2, 1.75};
    g.energy = {0.1, 1.0, 2.0};
    g.duration = {1.0, 1.3, 1.6, 1.8};
  }
  return g;
}

CoefficientGrid BuildGrid(const std::string& preset) {
  if (preset == "exp1") return BuildGrid(GridPreset::kExp1);
  if (preset == "exp2") return BuildGrid(GridPreset::kExp2);
  Fail(ErrorCode::kInvalidArgument, "unknown grid preset '" + preset + "' (expected exp1 or exp2)");
}

Json AugmentationPlan::ToJson() const {
  Json j;
  j["grid"] = grid.ToJson();
  j["multiplier"] = multiplier;
  j["base_seed"] = base_seed;
  Json entries_json = Json::array();
  for (const auto& e : entries) {
    entries_json.push_back({{"utterance_id", e.utterance_id},
                            {"combination", e.combination},
                            {"output_id", e.output_id},
                            {"controls", e.controls.ToJson()}});
  }
  j["entries"] = std::move(entries_json);
  return j;
}

AugmentationPlan SamplePlan(const CoefficientGrid& grid, std::span<const Utterance> corpus,
                            int multiplier, std::uint64_t base_seed) {
  grid.Validate();
  const std::size_t n = grid.size();
  Require(multiplier >= 1, "plan: multiplier must be >= 1");
  if (static_cast<std::size_t>(multiplier) > n) {
    Fail(ErrorCode::kInvalidArgument, "plan: multiplier " + std::to_string(multiplier) +
                                          " exceeds the grid size " + std::to_string(n));
  }
  AugmentationPlan plan;
  plan.grid = grid;
  plan.multiplier = multiplier;
  plan.base_seed = base_seed;
  std::vector<std::size_t> pool(n);
  for (const Utterance& u : corpus) {
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    Rng rng(StableHash(base_seed, u.id));
    // Partial Fisher-Yates: the first `multiplier` slots are the draw.
    for (int i = 0; i < multiplier; ++i) {
      const std::size_t j = i + rng.UniformInt(n - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> chosen(pool.begin(), pool.begin() + multiplier);
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t combo : chosen) {
      PlanEntry e;
      e.utterance_id = u.id;
      e.combination = combo;
      e.controls = grid.Combination(combo);
      e.controls.seed = StableHash(base_seed, u.id, combo);
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_aug%03zu", combo);
      e.output_id = u.id + suffix;
      plan.entries.push_back(std::move(e));
    }
  }
  return plan;
}

RunResult RunPlan(const AugmentationPlan& plan, std::span<const Utterance> corpus,
                  const std::filesystem::path& corpus_manifest, ModelBundle& bundle,
                  const SeverityPauseStats& pause_stats, const std::filesystem::path& out_dir,
                  const RunOptions& options) {
  namespace fs = std::filesystem;
  options.features.Validate();
  fs::create_directories(out_dir / "mel");
  fs::create_directories(out_dir / "report");
  if (options.write_wav) fs::create_directories(out_dir / "wav");
  const fs::path out_abs = fs::absolute(out_dir);

  std::map<std::string, const Utterance*> by_id;
  RunResult result;
  auto relocate = [&](const std::optional<std::string>& stored) -> std::optional<std::string> {
    if (!stored) return std::nullopt;
    const fs::path abs = fs::absolute(ResolveCorpusPath(corpus_manifest, *stored));
    return abs.lexically_normal().lexically_relative(out_abs.lexically_normal()).generic_string();
  };
  for (const Utterance& u : corpus) {
    by_id[u.id] = &u;
    Utterance copy = u;
    copy.synthetic = false;
    copy.alignment_path = relocate(u.alignment_path);
    copy.mel_path = relocate(u.mel_path);
    copy.audio_path = relocate(u.audio_path);
    result.manifest.push_back(std::move(copy));
  }

  for (const PlanEntry& e : plan.entries) {
    auto it = by_id.find(e.utterance_id);
    if (it == by_id.end()) {
      result.failures.push_back(
          {e.output_id, "source utterance '" + e.utterance_id + "' not in corpus"});
      continue;
    }
    const Utterance& src = *it->second;
    try {
      SynthesisResult syn = Synthesize(bundle, src.phones, src.speaker_id, e.controls, pause_stats);
      Utterance rec;
      rec.id = e.output_id;
      rec.speaker_id = src.speaker_id;
      rec.severity = e.controls.severity;
      rec.text = src.text;
      rec.phones = syn.report.phones;
      rec.mel_path = "mel/" + e.output_id + ".mel";
      WriteMel(syn.mel, out_dir / *rec.mel_path);
      WriteTextFile(out_dir / "report" / (e.output_id + ".json"),
                    syn.report.ToJson().dump(2) + "\n");
      if (options.write_wav) {
        rec.audio_path = "wav/" + e.output_id + ".wav";
        GriffinLimOptions gl;
        gl.n_iters = options.griffin_lim_iters;
        gl.seed = e.controls.seed;
        WriteWav(out_dir / *rec.audio_path, GriffinLim(syn.mel, options.features, gl),
                 options.features.sample_rate);
      }
      rec.synthetic = true;
      rec.source_id = src.id;
      rec.controls = e.controls.ToJson();
      result.manifest.push_back(std::move(rec));
    } catch (const Error& err) {
      result.failures.push_back({e.output_id, err.what()});
    }
  }

  SaveManifest(result.manifest, out_dir / "manifest.jsonl", true);
  Json failures = Json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"output_id", f.output_id}, {"error", f.message}});
  }
  WriteTextFile(out_dir / "failures.json", failures.dump(2) + "\n");
  return result;
}

}  // namespace dystts
