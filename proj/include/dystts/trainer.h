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

#ifndef DYSTTS_TRAINER_H_
#define DYSTTS_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dystts/acoustic_model.h"
#include "dystts/audio.h"
#include "dystts/nn/checkpoint.h"
#include "dystts/nn/grad_check.h"

namespace dystts {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-9;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;
  LossWeights loss_weights;
  // Global gradient-norm clip; 0 disables.
  double grad_clip = 1.0;
  // Probability of training an utterance without its speaker embedding.
  double speaker_dropout = 0.5;

  void Validate() const;
  Json ToJson() const;
  static TrainConfig FromJson(const Json& j);
};

struct TrainingItem {
  std::string id;
  ModelInput input;
  ProsodyTargets targets;
  MelSpectrogram mel;
};

struct PreparedCorpus {
  std::vector<std::string> speakers;  // sorted; position = speaker id
  std::vector<TrainingItem> items;    // manifest order
};

// Loads alignments, mels and audio and extracts the prosody targets.
PreparedCorpus PrepareCorpus(const std::filesystem::path& manifest, const FrameParams& params);

struct LossSummary {
  double mel = 0, duration = 0, pitch = 0, energy = 0, severity = 0, total = 0;
};

struct EpochMetrics {
  int epoch = 0;
  std::string split;  // "train" or "validation"
  LossSummary loss;
  Json ToJson() const;
};

// Seeded train/validation partition; validation gets round(n * fraction).
void SplitCorpus(std::size_t n, double validation_fraction, std::uint64_t seed,
                 std::vector<std::size_t>* train, std::vector<std::size_t>* validation);

// Teacher-forced losses without touching the parameters.
LossSummary Evaluate(AcousticModel<float>& model, const PreparedCorpus& corpus,
                     std::span<const std::size_t> indices, const LossWeights& weights,
                     int batch_size);

struct TrainResult {
  std::vector<EpochMetrics> history;
  int best_epoch = 0;
  std::vector<nn::NamedTensor> best_parameters;
  std::unique_ptr<AcousticModel<float>> model;  // state after the last epoch
  std::vector<std::size_t> train_indices, validation_indices;
};

struct TrainOptions {
  // When set, best.ckpt, last.ckpt (with sidecars), metrics.jsonl and
  // split.json are written here.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const EpochMetrics&)> on_epoch;
};

TrainResult Train(const ModelConfig& model_config, const TrainConfig& train_config,
                  const PreparedCorpus& corpus, const TrainOptions& options = {});

struct ModelGradCheckOptions {
  int n_phonemes = 4;
  std::uint64_t seed = 0;
  nn::GradCheckOptions check;
  // Take the finite differences on an extended-precision copy of the model.
  bool extended_reference = true;
};

// Finite-difference check of the full teacher-forced training loss of a
// 64-bit model built from `config` on a random input (dropout off).
nn::GradCheckResult ModelGradCheck(const ModelConfig& config,
                                   const ModelGradCheckOptions& options = {});

// Adam over a parameter set.
class Adam {
 public:
  Adam(nn::ParameterSet<float>& params, double lr, double beta1, double beta2, double eps);
  void Step();

 private:
  nn::ParameterSet<float>& params_;
  double lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  std::vector<nn::Tensor<float>> m_, v_;
};

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping.
double ClipGradNorm(nn::ParameterSet<float>& params, double max_norm);

}  // namespace dystts

#endif  // DYSTTS_TRAINER_H_
