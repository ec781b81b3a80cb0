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
#include <set>

#include "dystts/phonemes.h"

namespace dystts {

using nn::Conv1dLayer;
using nn::Embedding;
using nn::LayerNormLayer;
using nn::Linear;
using nn::SeqLayout;
using nn::Tensor;
using nn::Var;

const char* MaskingModeName(MaskingMode mode) {
  return mode == MaskingMode::kPhoneme ? "phoneme" : "frame";
}

MaskingMode ParseMaskingMode(const std::string& name) {
  if (name == "phoneme") return MaskingMode::kPhoneme;
  if (name == "frame") return MaskingMode::kFrame;
  Fail(ErrorCode::kInvalidArgument, "unknown masking mode '" + name + "'");
}

void ModelConfig::Validate() const {
  Require(n_encoder_blocks >= 1 && n_decoder_blocks >= 1, "model: need at least one block");
  Require(hidden >= 1 && n_heads >= 1, "model: hidden and n_heads must be positive");
  Require(hidden % n_heads == 0, "model: hidden (" + std::to_string(hidden) +
                                     ") not divisible by n_heads (" +
                                     std::to_string(n_heads) + ")");
  Require(ff_conv_kernel >= 1 && ff_conv_kernel % 2 == 1, "model: ff_conv_kernel must be odd");
  Require(predictor_conv_kernel >= 1 && predictor_conv_kernel % 2 == 1,
          "model: predictor_conv_kernel must be odd");
  Require(ff_filter >= 1, "model: ff_filter must be positive");
  Require(n_mels == kNumMels, "model: n_mels must be 80");
  Require(n_severities == kNumSeverities, "model: n_severities must be 3");
  Require(predictor_dropout >= 0.0 && predictor_dropout < 1.0,
          "model: predictor_dropout outside [0,1)");
  Require(block_dropout >= 0.0 && block_dropout < 1.0, "model: block_dropout outside [0,1)");
  Require(n_phonemes >= 0 && n_phonemes <= static_cast<int>(PhonemeCount()),
          "model: n_phonemes exceeds the inventory");
  Require(n_speakers >= 1, "model: n_speakers must be positive");
}

Json ModelConfig::ToJson() const {
  Json j;
  j["n_encoder_blocks"] = n_encoder_blocks;
  j["n_decoder_blocks"] = n_decoder_blocks;
  j["hidden"] = hidden;
  j["n_heads"] = n_heads;
  j["ff_conv_kernel"] = ff_conv_kernel;
  j["ff_filter"] = ff_filter;
  j["n_mels"] = n_mels;
  j["n_severities"] = n_severities;
  j["predictor_conv_kernel"] = predictor_conv_kernel;
  j["predictor_dropout"] = predictor_dropout;
  j["block_dropout"] = block_dropout;
  j["masking_mode"] = MaskingModeName(masking_mode);
  j["n_phonemes"] = n_phonemes;
  j["n_speakers"] = n_speakers;
  return j;
}

namespace {

void RejectUnknownKeys(const Json& j, const std::set<std::string>& known, const char* what) {
  Require(j.is_object(), std::string(what) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      Fail(ErrorCode::kInvalidArgument, std::string(what) + ": unknown key '" + key + "'");
    }
  }
}

template <typename V>
void ReadKey(const Json& j, const char* key, V* out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<V>();
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ModelConfig ModelConfig::FromJson(const Json& j) {
  RejectUnknownKeys(j,
                    {"n_encoder_blocks", "n_decoder_blocks", "hidden", "n_heads",
                     "ff_conv_kernel", "ff_filter", "n_mels", "n_severities",
                     "predictor_conv_kernel", "predictor_dropout", "block_dropout",
                     "masking_mode", "n_phonemes", "n_speakers"},
                    "model config");
  ModelConfig c;
  ReadKey(j, "n_encoder_blocks", &c.n_encoder_blocks);
  ReadKey(j, "n_decoder_blocks", &c.n_decoder_blocks);
  ReadKey(j, "hidden", &c.hidden);
  ReadKey(j, "n_heads", &c.n_heads);
  ReadKey(j, "ff_conv_kernel", &c.ff_conv_kernel);
  ReadKey(j, "ff_filter", &c.ff_filter);
  ReadKey(j, "n_mels", &c.n_mels);
  ReadKey(j, "n_severities", &c.n_severities);
  ReadKey(j, "predictor_conv_kernel", &c.predictor_conv_kernel);
  ReadKey(j, "predictor_dropout", &c.predictor_dropout);
  ReadKey(j, "block_dropout", &c.block_dropout);
  std::string mode = MaskingModeName(c.masking_mode);
  ReadKey(j, "masking_mode", &mode);
  c.masking_mode = ParseMaskingMode(mode);
  ReadKey(j, "n_phonemes", &c.n_phonemes);
  ReadKey(j, "n_speakers", &c.n_speakers);
  c.Validate();
  return c;
}

void SynthesisControls::Validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= kMinCoefficient && v <= kMaxCoefficient)) {
      Fail(ErrorCode::kInvalidArgument,
           std::string(name) + " " + std::to_string(v) + " outside [0, 2]");
    }
  };
  check(pitch_coef, "pitch_coef");
  check(energy_coef, "energy_coef");
  check(duration_coef, "duration_coef");
  Require(severity >= 0 && severity < kNumSeverities,
          "severity " + std::to_string(severity) + " not in {0,1,2}");
}

Json SynthesisControls::ToJson() const {
  Json j;
  j["pitch_coef"] = pitch_coef;
  j["energy_coef"] = energy_coef;
  j["duration_coef"] = duration_coef;
  j["severity"] = severity;
  j["pause_insertion"] = pause_insertion;
  j["pause_mode"] = PauseCountModeName(pause_mode);
  j["seed"] = seed;
  return j;
}

SynthesisControls SynthesisControls::FromJson(const Json& j) {
  RejectUnknownKeys(j,
                    {"pitch_coef", "energy_coef", "duration_coef", "severity", "pause_insertion",
                     "pause_mode", "seed"},
                    "controls");
  SynthesisControls c;
  ReadKey(j, "pitch_coef", &c.pitch_coef);
  ReadKey(j, "energy_coef", &c.energy_coef);
  ReadKey(j, "duration_coef", &c.duration_coef);
  ReadKey(j, "severity", &c.severity);
  ReadKey(j, "pause_insertion", &c.pause_insertion);
  std::string mode = PauseCountModeName(c.pause_mode);
  ReadKey(j, "pause_mode", &mode);
  c.pause_mode = ParsePauseCountMode(mode);
  ReadKey(j, "seed", &c.seed);
  c.Validate();
  return c;
}

Json LossWeights::ToJson() const {
  return Json{{"mel", mel},
              {"duration", duration},
              {"pitch", pitch},
              {"energy", energy},
              {"severity", severity}};
}

LossWeights LossWeights::FromJson(const Json& j) {
  RejectUnknownKeys(j, {"mel", "duration", "pitch", "energy", "severity"}, "loss weights");
  LossWeights w;
  ReadKey(j, "mel", &w.mel);
  ReadKey(j, "duration", &w.duration);
  ReadKey(j, "pitch", &w.pitch);
  ReadKey(j, "energy", &w.energy);
  ReadKey(j, "severity", &w.severity);
  for (double v : {w.mel, w.duration, w.pitch, w.energy, w.severity}) {
    Require(std::isfinite(v) && v >= 0.0, "loss weights must be finite and non-negative");
  }
  return w;
}

double Denormalize(double z, double mean, double std) { return mean + std * z; }

template <typename T>
Var<T> LengthRegulate(const Var<T>& hidden, const SeqLayout& src,
                      const std::vector<std::vector<int>>& durations, SeqLayout* frame_layout) {
  Require(durations.size() == src.batch, "length_regulate: batch size mismatch");
  Require(hidden.rows() == src.rows(), "length_regulate: hidden rows do not match layout");
  std::vector<std::size_t> lengths(src.batch, 0);
  for (std::size_t b = 0; b < src.batch; ++b) {
    Require(durations[b].size() == src.lengths[b],
            "length_regulate: " + std::to_string(durations[b].size()) + " durations for " +
                std::to_string(src.lengths[b]) + " positions");
    for (int d : durations[b]) {
      Require(d >= 0, "length_regulate: negative duration");
      lengths[b] += static_cast<std::size_t>(d);
    }
    if (lengths[b] == 0) {
      Fail(ErrorCode::kEmptyOutput, "length_regulate: all durations are zero");
    }
  }
  *frame_layout = SeqLayout::FromLengths(lengths);
  std::vector<std::ptrdiff_t> index(frame_layout->rows(), -1);
  for (std::size_t b = 0; b < src.batch; ++b) {
    std::size_t t = 0;
    for (std::size_t i = 0; i < durations[b].size(); ++i) {
      for (int k = 0; k < durations[b][i]; ++k) {
        index[b * frame_layout->max_len + t++] =
            static_cast<std::ptrdiff_t>(b * src.max_len + i);
      }
    }
  }
  return nn::GatherRows(hidden, std::span<const std::ptrdiff_t>(index));
}

namespace {

template <typename T>
struct FftBlock {
  Linear<T> q, k, v, o;
  LayerNormLayer<T> ln1, ln2;
  Conv1dLayer<T> conv1, conv2;

  FftBlock(nn::ParameterSet<T>& ps, const std::string& name, const ModelConfig& c, Rng& rng) {
    const std::size_t h = c.hidden;
    q = Linear<T>(ps, name + ".attn.q", h, h, rng);
    // A key bias only shifts each query's logits by a constant, which softmax ignores.
    k = Linear<T>(ps, name + ".attn.k", h, h, rng, /*bias=*/false);
    v = Linear<T>(ps, name + ".attn.v", h, h, rng);
    o = Linear<T>(ps, name + ".attn.o", h, h, rng);
    ln1 = LayerNormLayer<T>(ps, name + ".ln1", h);
    conv1 = Conv1dLayer<T>(ps, name + ".ff.conv1", h, c.ff_filter, c.ff_conv_kernel, rng);
    conv2 = Conv1dLayer<T>(ps, name + ".ff.conv2", c.ff_filter, h, 1, rng);
    ln2 = LayerNormLayer<T>(ps, name + ".ln2", h);
  }

  Var<T> operator()(const Var<T>& x, const SeqLayout& layout, std::span<const T> mask,
                    std::size_t heads, T dropout, Rng& rng, bool training) const {
    Var<T> a = o(nn::MultiHeadAttention(q(x), k(x), v(x), heads, layout));
    a = nn::Dropout(a, dropout, rng, training);
    Var<T> y = nn::MulRows(ln1(nn::Add(x, a)), mask);
    Var<T> f = conv2(nn::Relu(conv1(y, layout)), layout);
    f = nn::Dropout(f, dropout, rng, training);
    return nn::MulRows(ln2(nn::Add(y, f)), mask);
  }
};

template <typename T>
struct VariancePredictor {
  Conv1dLayer<T> conv1, conv2;
  LayerNormLayer<T> ln1, ln2;
  Linear<T> out;

  VariancePredictor(nn::ParameterSet<T>& ps, const std::string& name, const ModelConfig& c,
                    std::size_t out_dim, Rng& rng) {
    const std::size_t h = c.hidden;
    conv1 = Conv1dLayer<T>(ps, name + ".conv1", h, h, c.predictor_conv_kernel, rng);
    ln1 = LayerNormLayer<T>(ps, name + ".ln1", h);
    conv2 = Conv1dLayer<T>(ps, name + ".conv2", h, h, c.predictor_conv_kernel, rng);
    ln2 = LayerNormLayer<T>(ps, name + ".ln2", h);
    out = Linear<T>(ps, name + ".linear", h, out_dim, rng);
  }

  Var<T> operator()(const Var<T>& x, const SeqLayout& layout, std::span<const T> mask, T dropout,
                    Rng& rng, bool training) const {
    Var<T> h = nn::MulRows(ln1(nn::Relu(conv1(x, layout))), mask);
    h = nn::Dropout(h, dropout, rng, training);
    h = nn::MulRows(ln2(nn::Relu(conv2(h, layout))), mask);
    h = nn::Dropout(h, dropout, rng, training);
    return nn::MulRows(out(h), mask);
  }
};

// One-row sequences, for the pooled severity head.
SeqLayout UnitLayout(std::size_t batch) {
  return SeqLayout::FromLengths(std::vector<std::size_t>(batch, 1));
}

template <typename T>
Tensor<T> Column(std::vector<T> values) {
  const std::size_t n = values.size();
  return Tensor<T>({n, 1}, std::move(values));
}

}  // namespace

template <typename T>
struct AcousticModel<T>::Layers {
  Embedding<T> phoneme, speaker, severity;
  std::vector<FftBlock<T>> encoder, decoder;
  std::unique_ptr<VariancePredictor<T>> duration, pitch, energy, severity_head;
  Linear<T> pitch_proj, energy_proj, mel_out;
};

template <typename T>
AcousticModel<T>::AcousticModel(const ModelConfig& config, std::uint64_t init_seed)
    : config_(config), layers_(std::make_unique<Layers>()), dropout_rng_(init_seed ^ 0xd50u) {
  config_.Validate();
  if (config_.n_phonemes == 0) config_.n_phonemes = static_cast<int>(PhonemeCount());
  Rng rng(init_seed);
  Layers& l = *layers_;
  const std::size_t h = config_.hidden;
  l.phoneme = Embedding<T>(params_, "encoder.phoneme_embedding", config_.n_phonemes, h, 1.0, rng);
  for (int i = 0; i < config_.n_encoder_blocks; ++i) {
    l.encoder.emplace_back(params_, "encoder.block" + std::to_string(i), config_, rng);
  }
  l.speaker = Embedding<T>(params_, "speaker_embedding", config_.n_speakers, h, 0.1, rng);
  l.severity = Embedding<T>(params_, "adaptor.severity_embedding", config_.n_severities, h, 0.1,
                            rng);
  l.severity_head = std::make_unique<VariancePredictor<T>>(params_, "adaptor.severity_head",
                                                           config_, config_.n_severities, rng);
  l.duration =
      std::make_unique<VariancePredictor<T>>(params_, "adaptor.duration", config_, 1, rng);
  l.pitch = std::make_unique<VariancePredictor<T>>(params_, "adaptor.pitch", config_, 1, rng);
  l.energy = std::make_unique<VariancePredictor<T>>(params_, "adaptor.energy", config_, 1, rng);
  l.pitch_proj = Linear<T>(params_, "adaptor.pitch_projection", 1, h, rng);
  l.energy_proj = Linear<T>(params_, "adaptor.energy_projection", 1, h, rng);
  for (int i = 0; i < config_.n_decoder_blocks; ++i) {
    l.decoder.emplace_back(params_, "decoder.block" + std::to_string(i), config_, rng);
  }
  l.mel_out = Linear<T>(params_, "decoder.mel_projection", h, config_.n_mels, rng);
}

template <typename T>
AcousticModel<T>::~AcousticModel() = default;
template <typename T>
AcousticModel<T>::AcousticModel(AcousticModel&&) noexcept = default;
template <typename T>
AcousticModel<T>& AcousticModel<T>::operator=(AcousticModel&&) noexcept = default;

template <typename T>
Embedding<T>& AcousticModel<T>::severity_embedding() {
  return layers_->severity;
}

template <typename T>
Embedding<T>& AcousticModel<T>::speaker_embedding() {
  return layers_->speaker;
}

template <typename T>
Batch<T> AcousticModel<T>::MakeBatch(std::span<const Example> examples, bool with_targets) const {
  Require(!examples.empty(), "batch: no examples");
  Batch<T> batch;
  std::vector<std::size_t> lengths;
  for (const Example& ex : examples) {
    Require(!ex.input.phone_ids.empty(), "batch: empty phoneme sequence");
    lengths.push_back(ex.input.phone_ids.size());
  }
  batch.src = SeqLayout::FromLengths(lengths);
  const std::size_t rows = batch.src.rows();
  batch.phone_rows.assign(rows, -1);
  batch.speaker_rows.assign(rows, -1);
  batch.is_pause.assign(rows, false);
  for (std::size_t b = 0; b < examples.size(); ++b) {
    const ModelInput& in = examples[b].input;
    Require(in.speaker >= 0 && in.speaker < config_.n_speakers,
            "batch: unknown speaker id " + std::to_string(in.speaker));
    Require(in.severity >= 0 && in.severity < config_.n_severities,
            "batch: severity " + std::to_string(in.severity) + " not in {0,1,2}");
    batch.severities.push_back(in.severity);
    for (std::size_t i = 0; i < in.phone_ids.size(); ++i) {
      const int id = in.phone_ids[i];
      Require(id >= 0 && id < config_.n_phonemes, "batch: unknown phoneme id " +
                                                       std::to_string(id));
      const std::size_t r = b * batch.src.max_len + i;
      batch.phone_rows[r] = id;
      batch.speaker_rows[r] = in.use_speaker ? in.speaker : -1;
      batch.is_pause[r] = id == kPauseId;
    }
  }
  if (!with_targets) return batch;

  batch.has_targets = true;
  batch.has_mel = true;
  std::vector<std::size_t> frame_lengths;
  for (const Example& ex : examples) {
    if (ex.targets == nullptr) {
      Fail(ErrorCode::kInvalidArgument, "batch: training requires prosody targets");
    }
    const ProsodyTargets& t = *ex.targets;
    Require(t.durations.size() == ex.input.phone_ids.size() &&
                t.pitch.size() == t.durations.size() && t.energy.size() == t.durations.size(),
            "batch: targets do not match the phoneme sequence");
    batch.target_durations.push_back(t.durations);
    frame_lengths.push_back(t.TotalFrames());
    if (ex.mel == nullptr) batch.has_mel = false;
  }
  batch.frames = SeqLayout::FromLengths(frame_lengths);
  for (std::size_t len : frame_lengths) {
    if (len == 0) Fail(ErrorCode::kInvalidArgument, "batch: target durations sum to zero");
  }

  const NormStats& ns = norm_;
  auto z_pitch = [&](double hz) { return hz > 0.0 ? (hz - ns.pitch_mean) / ns.pitch_std : 0.0; };
  auto z_energy = [&](double e) { return (e - ns.energy_mean) / ns.energy_std; };

  std::vector<T> log_dur(rows, T(0));
  for (std::size_t b = 0; b < examples.size(); ++b) {
    const auto& d = examples[b].targets->durations;
    for (std::size_t i = 0; i < d.size(); ++i) {
      log_dur[b * batch.src.max_len + i] = static_cast<T>(std::log1p(static_cast<double>(d[i])));
    }
  }
  batch.log_duration_target = Column(std::move(log_dur));

  const bool frame_level = config_.masking_mode == MaskingMode::kFrame;
  const SeqLayout& level = frame_level ? batch.frames : batch.src;
  std::vector<T> pitch(level.rows(), T(0)), energy(level.rows(), T(0));
  batch.pitch_weights.assign(level.rows(), T(0));
  batch.prosody_weights = level.RowMask<T>();
  for (std::size_t b = 0; b < examples.size(); ++b) {
    const ProsodyTargets& t = *examples[b].targets;
    const auto& p = frame_level ? t.frame_pitch : t.pitch;
    const auto& e = frame_level ? t.frame_energy : t.energy;
    Require(p.size() == level.lengths[b] && e.size() == level.lengths[b],
            "batch: pitch/energy targets have the wrong length");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::size_t r = b * level.max_len + i;
      pitch[r] = static_cast<T>(z_pitch(p[i]));
      energy[r] = static_cast<T>(z_energy(e[i]));
      batch.pitch_weights[r] = p[i] > 0.0 ? T(1) : T(0);
    }
  }
  batch.pitch_target = Column(std::move(pitch));
  batch.energy_target = Column(std::move(energy));

  if (batch.has_mel) {
    batch.mel_target = Tensor<T>::Matrix2D(batch.frames.rows(), config_.n_mels);
    for (std::size_t b = 0; b < examples.size(); ++b) {
      const MelSpectrogram& mel = *examples[b].mel;
      Require(mel.n_mels == static_cast<std::size_t>(config_.n_mels),
              "batch: mel has the wrong number of channels");
      Require(mel.n_frames == batch.frames.lengths[b],
              "batch: mel has " + std::to_string(mel.n_frames) + " frames but durations sum to " +
                  std::to_string(batch.frames.lengths[b]));
      for (std::size_t t = 0; t < mel.n_frames; ++t) {
        for (std::size_t c = 0; c < mel.n_mels; ++c) {
          batch.mel_target.at(b * batch.frames.max_len + t, c) = static_cast<T>(mel.at(t, c));
        }
      }
    }
  }
  return batch;
}

template <typename T>
Var<T> AcousticModel<T>::Encode(const Batch<T>& batch, RunMode mode) {
  const Layers& l = *layers_;
  const bool training = mode == RunMode::kTrain;
  const std::vector<T> mask = batch.src.template RowMask<T>();
  Var<T> x = l.phoneme(batch.phone_rows);
  x = nn::Add(x, Var<T>::Constant(nn::BatchedPositions<T>(batch.src, config_.hidden)));
  x = nn::MulRows(x, std::span<const T>(mask));
  for (const auto& block : l.encoder) {
    x = block(x, batch.src, mask, config_.n_heads, static_cast<T>(config_.block_dropout),
              dropout_rng_, training);
  }
  return nn::Add(x, l.speaker(batch.speaker_rows));
}

template <typename T>
typename AcousticModel<T>::Head AcousticModel<T>::AdaptorHead(const Var<T>& hidden,
                                                              const Batch<T>& batch,
                                                              RunMode mode) {
  const Layers& l = *layers_;
  const bool training = mode == RunMode::kTrain;
  const T pdrop = static_cast<T>(config_.predictor_dropout);
  const SeqLayout& src = batch.src;
  const std::vector<T> src_mask = src.template RowMask<T>();
  Head head;
  const SeqLayout unit = UnitLayout(src.batch);
  const std::vector<T> unit_mask = unit.template RowMask<T>();
  head.severity_logits =
      (*l.severity_head)(nn::MeanPool(hidden, src), unit, unit_mask, pdrop, dropout_rng_, training);
  std::vector<std::ptrdiff_t> severity_rows(src.rows(), -1);
  for (std::size_t r = 0; r < src.rows(); ++r) {
    if (src.Valid(r)) severity_rows[r] = batch.severities[r / src.max_len];
  }
  head.h = nn::Add(hidden, l.severity(severity_rows));
  head.log_duration = (*l.duration)(head.h, src, src_mask, pdrop, dropout_rng_, training);
  return head;
}

template <typename T>
AdaptorOutput<T> AcousticModel<T>::VarianceAdapt(const Var<T>& hidden, const Batch<T>& batch,
                                                 std::span<const SynthesisControls> controls,
                                                 RunMode mode) {
  if (mode == RunMode::kInference) {
    Require(controls.size() == batch.src.batch, "variance_adapt: one control set per utterance");
    for (const auto& c : controls) c.Validate();
  } else if (!batch.has_targets) {
    Fail(ErrorCode::kInvalidArgument, "variance_adapt: training requires targets");
  }
  return AdaptorTail(AdaptorHead(hidden, batch, mode), batch, controls, mode);
}

template <typename T>
AdaptorOutput<T> AcousticModel<T>::AdaptorTail(const Head& head, const Batch<T>& batch,
                                               std::span<const SynthesisControls> controls,
                                               RunMode mode) {
  const Layers& l = *layers_;
  const bool training = mode == RunMode::kTrain;
  const bool infer = mode == RunMode::kInference;
  const T pdrop = static_cast<T>(config_.predictor_dropout);
  const SeqLayout& src = batch.src;
  const std::size_t batch_size = src.batch;
  AdaptorOutput<T> out;
  out.severity_logits = head.severity_logits;
  const Var<T>& h = head.h;
  out.log_duration = head.log_duration;
  if (infer) {
    out.reports.resize(batch_size);
    out.durations.resize(batch_size);
    const Tensor<T>& ld = out.log_duration.value();
    for (std::size_t b = 0; b < batch_size; ++b) {
      VarianceReport& rep = out.reports[b];
      for (std::size_t i = 0; i < src.lengths[b]; ++i) {
        const std::size_t r = b * src.max_len + i;
        const double predicted = std::max(0.0, std::expm1(static_cast<double>(ld[r])));
        const double scaled = controls[b].duration_coef * predicted;
        const int floor = batch.is_pause[r] ? 0 : 1;
        rep.predicted_duration.push_back(predicted);
        rep.scaled_duration.push_back(scaled);
        rep.durations.push_back(std::max(floor, static_cast<int>(std::lround(scaled))));
      }
      out.durations[b] = rep.durations;
    }
  } else {
    out.durations = batch.target_durations;
  }

  // Predicts pitch and energy over `layout`, then adds their projections to x.
  auto condition = [&](const Var<T>& x, const SeqLayout& layout) {
    const std::vector<T> mask = layout.template RowMask<T>();
    out.pitch = (*l.pitch)(x, layout, mask, pdrop, dropout_rng_, training);
    out.energy = (*l.energy)(x, layout, mask, pdrop, dropout_rng_, training);
    Tensor<T> pitch_in, energy_in;
    if (infer) {
      const NormStats& ns = norm_;
      pitch_in = Tensor<T>::Matrix2D(layout.rows(), 1);
      energy_in = Tensor<T>::Matrix2D(layout.rows(), 1);
      for (std::size_t b = 0; b < batch_size; ++b) {
        VarianceReport& rep = out.reports[b];
        rep.frame_level_prosody = config_.masking_mode == MaskingMode::kFrame;
        for (std::size_t i = 0; i < layout.lengths[b]; ++i) {
          const std::size_t r = b * layout.max_len + i;
          const double p = std::max(
              0.0, Denormalize(out.pitch.value()[r], ns.pitch_mean, ns.pitch_std));
          const double e = std::max(
              0.0, Denormalize(out.energy.value()[r], ns.energy_mean, ns.energy_std));
          const double pa = controls[b].pitch_coef * p;
          const double ea = controls[b].energy_coef * e;
          rep.predicted_pitch.push_back(p);
          rep.applied_pitch.push_back(pa);
          rep.predicted_energy.push_back(e);
          rep.applied_energy.push_back(ea);
          pitch_in[r] = static_cast<T>((pa - ns.pitch_mean) / ns.pitch_std);
          energy_in[r] = static_cast<T>((ea - ns.energy_mean) / ns.energy_std);
        }
      }
    } else {
      pitch_in = batch.pitch_target;
      energy_in = batch.energy_target;
    }
    Var<T> y = nn::Add(x, l.pitch_proj(Var<T>::Constant(std::move(pitch_in))));
    y = nn::Add(y, l.energy_proj(Var<T>::Constant(std::move(energy_in))));
    return nn::MulRows(y, std::span<const T>(mask));
  };

  if (config_.masking_mode == MaskingMode::kPhoneme) {
    Var<T> conditioned = condition(h, src);
    out.frames = LengthRegulate(conditioned, src, out.durations, &out.frame_layout);
  } else {
    Var<T> expanded = LengthRegulate(h, src, out.durations, &out.frame_layout);
    out.frames = condition(expanded, out.frame_layout);
  }
  return out;
}

template <typename T>
Var<T> AcousticModel<T>::Decode(const Var<T>& frames, const SeqLayout& layout, RunMode mode) {
  if (layout.rows() == 0 || layout.ValidCount() == 0) {
    Fail(ErrorCode::kEmptyOutput, "decode: empty frame sequence");
  }
  Require(
      frames.rows() == layout.rows() && frames.cols() == static_cast<std::size_t>(config_.hidden),
      "decode: frame hidden has shape " + nn::ShapeString(frames.shape()));
  const Layers& l = *layers_;
  const bool training = mode == RunMode::kTrain;
  const std::vector<T> mask = layout.template RowMask<T>();
  Var<T> x = nn::Add(frames, Var<T>::Constant(nn::BatchedPositions<T>(layout, config_.hidden)));
  x = nn::MulRows(x, std::span<const T>(mask));
  for (const auto& block : l.decoder) {
    x = block(x, layout, mask, config_.n_heads, static_cast<T>(config_.block_dropout),
              dropout_rng_, training);
  }
  return nn::MulRows(l.mel_out(x), std::span<const T>(mask));
}

template <typename T>
Predictions<T> AcousticModel<T>::Forward(const Batch<T>& batch,
                                         std::span<const SynthesisControls> controls,
                                         RunMode mode) {
  Predictions<T> pred;
  Var<T> hidden = Encode(batch, mode);
  pred.adaptor = VarianceAdapt(hidden, batch, controls, mode);
  pred.mel = Decode(pred.adaptor.frames, pred.adaptor.frame_layout, mode);
  return pred;
}

template <typename T>
Predictions<T> AcousticModel<T>::InferWithInsertedPauses(const ModelInput& input,
                                                         std::span<const std::size_t> inserted,
                                                         const SynthesisControls& controls) {
  controls.Validate();
  const std::size_t n = input.phone_ids.size();
  std::vector<bool> is_inserted(n, false);
  for (std::size_t pos : inserted) {
    Require(pos < n && input.phone_ids[pos] == kPauseId,
            "inserted pause position " + std::to_string(pos) + " is not a PAUSE token");
    is_inserted[pos] = true;
  }
  ModelInput base = input;
  base.phone_ids.clear();
  // Row of each output position in the base sequence, or -1 when inserted.
  std::vector<std::ptrdiff_t> from_base(n, -1), from_full(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_inserted[i]) {
      from_full[i] = static_cast<std::ptrdiff_t>(i);
    } else {
      from_base[i] = static_cast<std::ptrdiff_t>(base.phone_ids.size());
      base.phone_ids.push_back(input.phone_ids[i]);
    }
  }
  Require(!base.phone_ids.empty(), "pause splice: nothing but inserted pauses");
  const Example full_ex{input, nullptr, nullptr};
  const Example base_ex{base, nullptr, nullptr};
  const Batch<T> full = MakeBatch(std::span(&full_ex, 1), false);
  const Batch<T> base_batch = MakeBatch(std::span(&base_ex, 1), false);
  const Head hb = AdaptorHead(Encode(base_batch, RunMode::kInference), base_batch,
                              RunMode::kInference);
  Head merged;
  if (inserted.empty()) {
    merged = hb;
  } else {
    const Head hf = AdaptorHead(Encode(full, RunMode::kInference), full, RunMode::kInference);
    auto merge = [&](const Var<T>& b, const Var<T>& f) {
      return nn::Add(nn::GatherRows(b, std::span<const std::ptrdiff_t>(from_base)),
                     nn::GatherRows(f, std::span<const std::ptrdiff_t>(from_full)));
    };
    merged.h = merge(hb.h, hf.h);
    merged.log_duration = merge(hb.log_duration, hf.log_duration);
    merged.severity_logits = hb.severity_logits;
  }
  Predictions<T> pred;
  pred.adaptor = AdaptorTail(merged, full, std::span(&controls, 1), RunMode::kInference);
  pred.mel = Decode(pred.adaptor.frames, pred.adaptor.frame_layout, RunMode::kInference);
  return pred;
}

template <typename T>
LossComponents<T> AcousticModel<T>::Loss(const Predictions<T>& pred, const Batch<T>& batch,
                                         const LossWeights& weights) const {
  Require(batch.has_targets && batch.has_mel, "loss: batch has no targets");
  Require(pred.adaptor.frame_layout.rows() == batch.frames.rows(),
          "loss: predicted frames do not match targets");
  LossComponents<T> c;
  const std::vector<T> frame_mask = batch.frames.template RowMask<T>();
  const std::vector<T> src_mask = batch.src.template RowMask<T>();
  c.mel = nn::MaskedMse(pred.mel, batch.mel_target, std::span<const T>(frame_mask));
  c.duration = nn::MaskedMse(pred.adaptor.log_duration, batch.log_duration_target,
                             std::span<const T>(src_mask));
  bool any_voiced = false;
  for (T w : batch.pitch_weights) any_voiced = any_voiced || w > T(0);
  c.pitch = any_voiced ? nn::MaskedMse(pred.adaptor.pitch, batch.pitch_target,
                                       std::span<const T>(batch.pitch_weights))
                       : Var<T>::Constant(Tensor<T>({1}, T(0)));
  c.energy = nn::MaskedMse(pred.adaptor.energy, batch.energy_target,
                           std::span<const T>(batch.prosody_weights));
  c.severity = nn::CrossEntropy(pred.adaptor.severity_logits,
                                std::span<const int>(batch.severities));
  c.total = nn::Add(
      nn::Add(nn::Add(nn::Scale(c.mel, static_cast<T>(weights.mel)),
                      nn::Scale(c.duration, static_cast<T>(weights.duration))),
              nn::Add(nn::Scale(c.pitch, static_cast<T>(weights.pitch)),
                      nn::Scale(c.energy, static_cast<T>(weights.energy)))),
      nn::Scale(c.severity, static_cast<T>(weights.severity)));
  return c;
}

template Var<float> LengthRegulate(const Var<float>&, const SeqLayout&,
                                   const std::vector<std::vector<int>>&, SeqLayout*);
template Var<double> LengthRegulate(const Var<double>&, const SeqLayout&,
                                    const std::vector<std::vector<int>>&, SeqLayout*);
template class AcousticModel<float>;
template class AcousticModel<double>;
// Extended precision backs the finite-difference reference of the model gradient check.
template Var<long double> LengthRegulate(const Var<long double>&, const SeqLayout&,
                                         const std::vector<std::vector<int>>&, SeqLayout*);
template class AcousticModel<long double>;

}  // namespace dystts
