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

#ifndef DYSTTS_ACOUSTIC_MODEL_H_
#define DYSTTS_ACOUSTIC_MODEL_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dystts/corpus_io.h"
#include "dystts/nn/layers.h"
#include "dystts/pause_model.h"
#include "dystts/prosody_features.h"

namespace dystts {

// Where pitch and energy enter the variance adaptor: per phoneme before
// length regulation (source mask), or per frame after it (mel mask).
enum class MaskingMode { kPhoneme, kFrame };

const char* MaskingModeName(MaskingMode mode);
MaskingMode ParseMaskingMode(const std::string& name);

struct ModelConfig {
  int n_encoder_blocks = 4;
  int n_decoder_blocks = 4;
  int hidden = 256;
  int n_heads = 2;
  int ff_conv_kernel = 9;
  int ff_filter = 1024;
  int n_mels = kNumMels;
  int n_severities = kNumSeverities;
  int predictor_conv_kernel = 3;
  double predictor_dropout = 0.5;
  double block_dropout = 0.1;
  MaskingMode masking_mode = MaskingMode::kPhoneme;
  int n_phonemes = 0;  // 0 means the full built-in inventory
  int n_speakers = 1;

  void Validate() const;
  Json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static ModelConfig FromJson(const Json& j);
  bool operator==(const ModelConfig&) const = default;
};

// The five inference knobs.
struct SynthesisControls {
  double pitch_coef = 1.0;
  double energy_coef = 1.0;
  double duration_coef = 1.0;
  int severity = 0;
  bool pause_insertion = false;
  PauseCountMode pause_mode = PauseCountMode::kStochastic;
  std::uint64_t seed = 0;

  void Validate() const;
  Json ToJson() const;
  static SynthesisControls FromJson(const Json& j);
  bool operator==(const SynthesisControls&) const = default;
};

inline constexpr double kMinCoefficient = 0.0;
inline constexpr double kMaxCoefficient = 2.0;

enum class RunMode {
  kTrain,          // teacher forcing, dropout active
  kTeacherForced,  // teacher forcing, dropout off (evaluation, gradcheck)
  kInference,      // predicted durations/pitch/energy scaled by controls
};

struct ModelInput {
  std::vector<int> phone_ids;
  int speaker = 0;
  int severity = 0;
  // When false the speaker embedding is not added for this utterance.
  bool use_speaker = true;
};

struct Example {
  ModelInput input;
  const ProsodyTargets* targets = nullptr;  // required unless inferring
  const MelSpectrogram* mel = nullptr;      // required for the mel loss
};

// A padded batch in the row layout of nn::SeqLayout.
template <typename T>
struct Batch {
  nn::SeqLayout src;
  std::vector<std::ptrdiff_t> phone_rows;    // phoneme id per source row, -1 on padding
  std::vector<std::ptrdiff_t> speaker_rows;  // speaker id per source row, -1 when absent
  std::vector<bool> is_pause;                // per source row
  std::vector<int> severities;               // per utterance

  bool has_targets = false;
  std::vector<std::vector<int>> target_durations;
  nn::SeqLayout frames;                     // from target durations
  nn::Tensor<T> log_duration_target;        // [src rows, 1]
  nn::Tensor<T> pitch_target, energy_target;  // normalized; phoneme or frame rows
  std::vector<T> pitch_weights;             // valid and voiced
  std::vector<T> prosody_weights;           // valid rows of the pitch/energy level
  bool has_mel = false;
  nn::Tensor<T> mel_target;                 // [frame rows, n_mels]
};

// Per-utterance record of what the variance adaptor predicted and applied.
struct VarianceReport {
  std::vector<double> predicted_duration;  // max(0, exp(d) - 1), before the coefficient
  std::vector<double> scaled_duration;     // duration_coef * predicted, before rounding
  std::vector<int> durations;              // rounded and floored, drives the regulator
  bool frame_level_prosody = false;        // pitch/energy vectors are per frame
  std::vector<double> predicted_pitch;     // Hz
  std::vector<double> applied_pitch;       // pitch_coef * predicted_pitch
  std::vector<double> predicted_energy;
  std::vector<double> applied_energy;      // energy_coef * predicted_energy
};

template <typename T>
struct AdaptorOutput {
  nn::Var<T> frames;           // [frame rows, hidden]
  nn::SeqLayout frame_layout;
  nn::Var<T> log_duration;     // [src rows, 1]
  nn::Var<T> pitch;            // normalized prediction [src or frame rows, 1]
  nn::Var<T> energy;
  nn::Var<T> severity_logits;  // [batch, n_severities]
  std::vector<std::vector<int>> durations;
  std::vector<VarianceReport> reports;  // inference only
};

template <typename T>
struct Predictions {
  AdaptorOutput<T> adaptor;
  nn::Var<T> mel;  // [frame rows, n_mels]
};

struct LossWeights {
  double mel = 1.0, duration = 1.0, pitch = 1.0, energy = 1.0, severity = 1.0;
  Json ToJson() const;
  static LossWeights FromJson(const Json& j);
};

template <typename T>
struct LossComponents {
  nn::Var<T> mel, duration, pitch, energy, severity, total;
};

// Expands row i of each sequence durations[b][i] times. Zero durations drop
// the position. Sets *frame_layout to the resulting padded layout.
template <typename T>
nn::Var<T> LengthRegulate(const nn::Var<T>& hidden, const nn::SeqLayout& src,
                          const std::vector<std::vector<int>>& durations,
                          nn::SeqLayout* frame_layout);

template <typename T>
class AcousticModel {
 public:
  AcousticModel(const ModelConfig& config, std::uint64_t init_seed);
  ~AcousticModel();
  AcousticModel(AcousticModel&&) noexcept;
  AcousticModel& operator=(AcousticModel&&) noexcept;

  const ModelConfig& config() const { return config_; }
  nn::ParameterSet<T>& parameters() { return params_; }
  const nn::ParameterSet<T>& parameters() const { return params_; }
  const NormStats& norm_stats() const { return norm_; }
  void set_norm_stats(const NormStats& norm) { norm_ = norm; }
  void set_dropout_seed(std::uint64_t seed) { dropout_rng_ = Rng(seed); }
  nn::Embedding<T>& severity_embedding();
  nn::Embedding<T>& speaker_embedding();

  Batch<T> MakeBatch(std::span<const Example> examples, bool with_targets) const;

  // Phoneme embedding + positions -> FFT blocks -> + speaker embedding.
  nn::Var<T> Encode(const Batch<T>& batch, RunMode mode);
  // controls holds one entry per utterance; only read in inference mode.
  AdaptorOutput<T> VarianceAdapt(const nn::Var<T>& hidden, const Batch<T>& batch,
                                 std::span<const SynthesisControls> controls, RunMode mode);
  // Positions -> FFT blocks -> linear projection to n_mels.
  nn::Var<T> Decode(const nn::Var<T>& frames, const nn::SeqLayout& layout, RunMode mode);

  Predictions<T> Forward(const Batch<T>& batch, std::span<const SynthesisControls> controls,
                         RunMode mode);
  // Inference for one utterance whose PAUSE tokens at `inserted` (positions
  // in input.phone_ids) were added by pause insertion. The other phonemes are
  // predicted from the sequence without those tokens, so inserting pauses
  // leaves their durations untouched; the PAUSE rows come from the full
  // sequence.
  Predictions<T> InferWithInsertedPauses(const ModelInput& input,
                                         std::span<const std::size_t> inserted,
                                         const SynthesisControls& controls);
  LossComponents<T> Loss(const Predictions<T>& pred, const Batch<T>& batch,
                         const LossWeights& weights) const;

 private:
  struct Layers;
  struct Head {
    nn::Var<T> h;  // hidden + severity embedding
    nn::Var<T> log_duration;
    nn::Var<T> severity_logits;
  };
  Head AdaptorHead(const nn::Var<T>& hidden, const Batch<T>& batch, RunMode mode);
  AdaptorOutput<T> AdaptorTail(const Head& head, const Batch<T>& batch,
                               std::span<const SynthesisControls> controls, RunMode mode);

  ModelConfig config_;
  nn::ParameterSet<T> params_;
  std::unique_ptr<Layers> layers_;
  NormStats norm_;
  Rng dropout_rng_;
};

// Reads a predicted normalized value back to its natural scale.
double Denormalize(double z, double mean, double std);

}  // namespace dystts

#endif  // DYSTTS_ACOUSTIC_MODEL_H_
