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

#include "dystts/toy_corpus.h"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "dystts/error.h"
#include "dystts/lexicon.h"
#include "dystts/phonemes.h"
#include "dystts/rng.h"

namespace dystts {
namespace {

constexpr double kPauseBaseFrames = 18.0;
constexpr int kMinPauseFrames = 10;
constexpr int kMinPhoneFrames = 2;
constexpr double kDurationJitter = 0.1;  // log-normal sigma
constexpr std::array<double, kNumSeverities> kSeverityPitchScale = {1.0, 0.96, 0.92};
constexpr std::array<double, kNumSeverities> kSeverityEnergyScale = {1.0, 0.88, 0.76};
constexpr const char* kSpeakerPrefix[kNumSeverities] = {"N", "L", "M"};

// Uniform in [-1, 1], fixed per (phone, speaker).
double PhoneOffset(int phone_id, const std::string& speaker, const char* what) {
  Rng rng(StableHash(static_cast<std::uint64_t>(phone_id), std::string(what) + speaker));
  return rng.Uniform(-1.0, 1.0);
}

double ClassAmplitude(PhoneClass c) {
  switch (c) {
    case PhoneClass::kPause: return 0.0;
    case PhoneClass::kVowel: return 0.5;
    case PhoneClass::kGlide: return 0.35;
    case PhoneClass::kNasal: return 0.28;
    case PhoneClass::kVoicedStop: return 0.25;
    case PhoneClass::kUnvoicedStop: return 0.25;
    case PhoneClass::kVoicedFricative: return 0.22;
    case PhoneClass::kUnvoicedFricative: return 0.15;
    case PhoneClass::kAffricate: return 0.18;
  }
  return 0.0;
}

// Second-order resonator with unit DC gain.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double Step(double x, double freq, double bw, double fs) {
    const double t = 1.0 / fs;
    const double c = -std::exp(-2.0 * std::numbers::pi * bw * t);
    const double b = 2.0 * std::exp(-std::numbers::pi * bw * t) *
                     std::cos(2.0 * std::numbers::pi * freq * t);
    const double a = 1.0 - b - c;
    const double y = a * x + b * y1 + c * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

struct Segment {
  int phone_id;
  int frames;
};

std::vector<float> Render(const std::vector<Segment>& segments, const ToySpeaker& speaker,
                          int severity, const FrameParams& params, std::uint64_t seed) {
  const double fs = params.sample_rate;
  const int hop = params.hop_length;
  std::size_t total = 0;
  for (const auto& s : segments) total += static_cast<std::size_t>(s.frames) * hop;
  std::vector<float> out(total, 0.0f);
  Rng noise(seed);
  Resonator r1, r2, r3;
  double phase = 0.0, f0 = 0.0, amp = 0.0, prev_noise = 0.0;
  double f1 = 500 * speaker.formant_scale, f2 = 1500 * speaker.formant_scale,
         f3 = 2500 * speaker.formant_scale;
  const double smooth_fast = 1.0 - std::exp(-1.0 / (0.003 * fs));
  const double smooth_slow = 1.0 - std::exp(-1.0 / (0.012 * fs));
  std::size_t n = 0;
  for (const auto& seg : segments) {
    const PhoneInfo& info = PhoneInfoById(seg.phone_id);
    const PhoneClass pc = info.phone_class;
    const bool voiced = IsVoicedClass(pc);
    const double target_f0 = speaker.base_f0 * kSeverityPitchScale[severity] *
                             (1.0 + 0.08 * PhoneOffset(seg.phone_id, speaker.id, "f0"));
    const double target_amp = ClassAmplitude(pc) * speaker.gain * kSeverityEnergyScale[severity] *
                              (1.0 + 0.1 * PhoneOffset(seg.phone_id, speaker.id, "amp"));
    const double tf1 = info.f1 > 0 ? info.f1 * speaker.formant_scale : f1;
    const double tf2 = info.f2 > 0 ? info.f2 * speaker.formant_scale : f2;
    const double tf3 = info.f3 > 0 ? info.f3 * speaker.formant_scale : f3;
    const std::size_t len = static_cast<std::size_t>(seg.frames) * hop;
    const bool stop = pc == PhoneClass::kVoicedStop || pc == PhoneClass::kUnvoicedStop;
    const std::size_t closure = stop ? len * 6 / 10 : 0;
    for (std::size_t i = 0; i < len; ++i, ++n) {
      double voice_gain = voiced ? 1.0 : 0.0;
      double noise_gain = 0.0;
      double a_target = target_amp;
      if (pc == PhoneClass::kUnvoicedFricative || pc == PhoneClass::kAffricate) {
        noise_gain = 1.0;
      } else if (pc == PhoneClass::kVoicedFricative) {
        noise_gain = 0.4;
      }
      if (stop) {
        if (i < closure) {
          a_target = pc == PhoneClass::kVoicedStop ? 0.3 * target_amp : 0.0;
          noise_gain = 0.0;
        } else {
          const double decay = std::exp(-static_cast<double>(i - closure) / (0.01 * fs));
          noise_gain = 1.5 * decay;
        }
      }
      amp += smooth_fast * (a_target - amp);
      if (f0 <= 0.0) f0 = target_f0;
      if (voiced) f0 += smooth_slow * (target_f0 - f0);
      f1 += smooth_slow * (tf1 - f1);
      f2 += smooth_slow * (tf2 - f2);
      f3 += smooth_slow * (tf3 - f3);

      double voice = 0.0;
      if (voice_gain > 0.0) {
        phase += f0 / fs;
        phase -= std::floor(phase);
        const double source = 2.0 * phase - 1.0;
        voice = r3.Step(r2.Step(r1.Step(source, f1, 90.0, fs), f2, 110.0, fs), f3, 160.0, fs);
      }
      const double white = noise.Normal();
      const double hiss = white - 0.95 * prev_noise;
      prev_noise = white;
      const double sample = amp * (voice_gain * voice * 3.0 + noise_gain * 0.3 * hiss);
      out[n] = static_cast<float>(std::clamp(sample, -1.0, 1.0));
    }
  }
  return out;
}

std::string Pad(int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, value);
  return buf;
}

}  // namespace

void ToyCorpusSpec::Validate() const {
  Require(n_speakers_per_severity >= 1, "toy corpus: n_speakers_per_severity must be >= 1");
  Require(n_utterances_per_speaker >= 1, "toy corpus: n_utterances_per_speaker must be >= 1");
  Require(min_words >= 1 && max_words >= min_words,
          "toy corpus: sentence_length_range must satisfy 1 <= min <= max");
  for (int s = 0; s < kNumSeverities; ++s) {
    Require(severity_duration_multipliers[s] > 0.0,
            "toy corpus: duration multipliers must be positive");
    Require(severity_pause_rates[s] >= 0.0 && severity_pause_rates[s] <= 1.0,
            "toy corpus: pause rates must be in [0, 1]");
    if (s > 0) {
      Require(severity_duration_multipliers[s] >= severity_duration_multipliers[s - 1],
              "toy corpus: duration multipliers must be non-decreasing with severity");
      Require(severity_pause_rates[s] >= severity_pause_rates[s - 1],
              "toy corpus: pause rates must be non-decreasing with severity");
    }
  }
}

Json ToyCorpusSpec::ToJson() const {
  Json j;
  j["n_speakers_per_severity"] = n_speakers_per_severity;
  j["n_utterances_per_speaker"] = n_utterances_per_speaker;
  j["sentence_length_range"] = {min_words, max_words};
  j["severity_duration_multipliers"] = severity_duration_multipliers;
  j["severity_pause_rates"] = severity_pause_rates;
  j["base_seed"] = base_seed;
  return j;
}

ToyCorpusSpec ToyCorpusSpec::FromJson(const Json& j) {
  Require(j.is_object(), "toy corpus spec: expected a JSON object");
  ToyCorpusSpec s;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_speakers_per_severity") {
        s.n_speakers_per_severity = value.get<int>();
      } else if (key == "n_utterances_per_speaker") {
        s.n_utterances_per_speaker = value.get<int>();
      } else if (key == "sentence_length_range") {
        Require(value.is_array() && value.size() == 2,
                "toy corpus spec: sentence_length_range must be [min, max]");
        s.min_words = value[0].get<int>();
        s.max_words = value[1].get<int>();
      } else if (key == "severity_duration_multipliers") {
        s.severity_duration_multipliers = value.get<std::array<double, kNumSeverities>>();
      } else if (key == "severity_pause_rates") {
        s.severity_pause_rates = value.get<std::array<double, kNumSeverities>>();
      } else if (key == "base_seed") {
        s.base_seed = value.get<std::uint64_t>();
      } else {
        Fail(ErrorCode::kInvalidArgument, "toy corpus spec: unknown key '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("toy corpus spec: ") + e.what());
  }
  s.Validate();
  return s;
}

std::vector<ToySpeaker> ToySpeakers(const ToyCorpusSpec& spec) {
  std::vector<ToySpeaker> speakers;
  for (int sev = 0; sev < kNumSeverities; ++sev) {
    for (int j = 0; j < spec.n_speakers_per_severity; ++j) {
      ToySpeaker s;
      s.id = kSpeakerPrefix[sev] + Pad(j + 1, 2);
      s.severity = sev;
      Rng rng(StableHash(spec.base_seed, "speaker:" + s.id));
      s.base_f0 = rng.Uniform(95.0, 230.0);
      s.formant_scale = rng.Uniform(0.9, 1.12);
      s.gain = rng.Uniform(0.85, 1.15);
      speakers.push_back(s);
    }
  }
  return speakers;
}

ToyUtterance BuildToyUtterance(const ToyCorpusSpec& spec, const FrameParams& params,
                               const ToySpeaker& speaker, int slot, int k, bool render) {
  const int sev = speaker.severity;
  const double mult = spec.severity_duration_multipliers[sev];
  // The prompt depends only on (slot, k): shared across severity groups.
  Rng prompt(StableHash(spec.base_seed, "prompt", static_cast<std::uint64_t>(slot) * 1000003u + k));
  const auto& vocab = LexiconWords();
  const int n_words =
      spec.min_words + static_cast<int>(prompt.UniformInt(spec.max_words - spec.min_words + 1));
  std::string text;
  for (int w = 0; w < n_words; ++w) {
    if (w) text += ' ';
    text += vocab[prompt.UniformInt(vocab.size())];
  }
  const PhonemeSequence words = TextToPhonemes(text);

  ToyUtterance out;
  Utterance& utt = out.utterance;
  utt.id = speaker.id + "_" + Pad(k, 4);
  utt.speaker_id = speaker.id;
  utt.severity = sev;
  utt.text = text;

  Rng rng(StableHash(spec.base_seed, "utt:" + utt.id));
  std::vector<Segment> segments;
  const double hop_s = params.HopSeconds();
  auto jitter = [&] { return std::exp(kDurationJitter * rng.Normal()); };
  int frame = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const int id = PhonemeId(words.tokens[i]);
    const int word = words.word_index[i];
    const int d = std::max(kMinPhoneFrames, static_cast<int>(std::lround(
                                                PhoneInfoById(id).base_frames * mult * jitter())));
    segments.push_back({id, d});
    utt.phones.tokens.push_back(words.tokens[i]);
    utt.phones.word_index.push_back(word);
    out.alignment.push_back({words.tokens[i], frame * hop_s, (frame + d) * hop_s, word});
    out.durations.push_back(d);
    frame += d;
    const bool boundary = i + 1 < words.size() && words.word_index[i + 1] != word;
    if (boundary && rng.Bernoulli(spec.severity_pause_rates[sev])) {
      const int p = std::max(kMinPauseFrames,
                             static_cast<int>(std::lround(kPauseBaseFrames * mult * jitter())));
      segments.push_back({kPauseId, p});
      utt.phones.tokens.emplace_back(kPauseSymbol);
      utt.phones.word_index.push_back(word);
      out.alignment.push_back({std::string(kSilenceSymbol), frame * hop_s, (frame + p) * hop_s,
                               word});
      out.durations.push_back(p);
      frame += p;
    }
  }
  if (render) {
    out.audio =
        Render(segments, speaker, sev, params, StableHash(spec.base_seed, "noise:" + utt.id));
    out.mel = ComputeMel(out.audio, params);
  }
  return out;
}

std::vector<Utterance> GenerateToyCorpus(const ToyCorpusSpec& spec, const FrameParams& params,
                                         const std::filesystem::path& out_dir) {
  spec.Validate();
  params.Validate();
  namespace fs = std::filesystem;
  for (const char* sub : {"align", "wav", "mel"}) fs::create_directories(out_dir / sub);
  std::vector<Utterance> manifest;
  for (const ToySpeaker& speaker : ToySpeakers(spec)) {
    const int slot = std::stoi(speaker.id.substr(1)) - 1;
    for (int k = 0; k < spec.n_utterances_per_speaker; ++k) {
      ToyUtterance t = BuildToyUtterance(spec, params, speaker, slot, k, true);
      Utterance& u = t.utterance;
      u.alignment_path = "align/" + u.id + ".jsonl";
      u.audio_path = "wav/" + u.id + ".wav";
      u.mel_path = "mel/" + u.id + ".mel";
      SaveAlignment(t.alignment, out_dir / *u.alignment_path);
      WriteWav(out_dir / *u.audio_path, t.audio, params.sample_rate);
      WriteMel(t.mel, out_dir / *u.mel_path);
      manifest.push_back(std::move(u));
    }
  }
  SaveManifest(manifest, out_dir / kManifestName);
  return manifest;
}

}  // namespace dystts
