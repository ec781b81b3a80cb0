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

#include "dystts/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "dystts/error.h"
#include "dystts/model_bundle.h"
#include "dystts/phonemes.h"
#include "dystts/rng.h"

namespace dystts {

void TrainConfig::Validate() const {
  Require(epochs >= 1, "train: epochs must be >= 1");
  Require(batch_size >= 1, "train: batch_size must be >= 1");
  Require(std::isfinite(learning_rate) && learning_rate >= 0.0,
          "train: learning_rate must be finite and >= 0");
  Require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
          "train: adam betas must be in [0, 1)");
  Require(adam_eps > 0.0, "train: adam eps must be positive");
  Require(validation_fraction > 0.0 && validation_fraction < 1.0,
          "train: validation_fraction must be in (0, 1)");
  Require(grad_clip >= 0.0, "train: grad_clip must be >= 0");
  Require(speaker_dropout >= 0.0 && speaker_dropout < 1.0,
          "train: speaker_dropout must be in [0, 1)");
}

Json TrainConfig::ToJson() const {
  Json j;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["adam_betas"] = {beta1, beta2};
  j["adam_eps"] = adam_eps;
  j["seed"] = seed;
  j["validation_fraction"] = validation_fraction;
  j["loss_weights"] = loss_weights.ToJson();
  j["grad_clip"] = grad_clip;
  j["speaker_dropout"] = speaker_dropout;
  return j;
}

TrainConfig TrainConfig::FromJson(const Json& j) {
  Require(j.is_object(), "train config: expected a JSON object");
  TrainConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "epochs") {
        c.epochs = value.get<int>();
      } else if (key == "batch_size") {
        c.batch_size = value.get<int>();
      } else if (key == "learning_rate") {
        c.learning_rate = value.get<double>();
      } else if (key == "adam_betas") {
        Require(value.is_array() && value.size() == 2, "train config: adam_betas must be [b1, b2]");
        c.beta1 = value[0].get<double>();
        c.beta2 = value[1].get<double>();
      } else if (key == "adam_eps") {
        c.adam_eps = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "validation_fraction") {
        c.validation_fraction = value.get<double>();
      } else if (key == "loss_weights") {
        c.loss_weights = LossWeights::FromJson(value);
      } else if (key == "grad_clip") {
        c.grad_clip = value.get<double>();
      } else if (key == "speaker_dropout") {
        c.speaker_dropout = value.get<double>();
      } else {
        Fail(ErrorCode::kInvalidArgument, "train config: unknown key '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("train config: ") + e.what());
  }
  c.Validate();
  return c;
}

PreparedCorpus PrepareCorpus(const std::filesystem::path& manifest, const FrameParams& params) {
  const std::vector<Utterance> utts = LoadManifest(manifest);
  Require(!utts.empty(), "prepare: manifest " + manifest.string() + " is empty");
  PreparedCorpus corpus;
  std::set<std::string> speakers;
  for (const auto& u : utts) speakers.insert(u.speaker_id);
  corpus.speakers.assign(speakers.begin(), speakers.end());
  std::map<std::string, int> speaker_index;
  for (std::size_t i = 0; i < corpus.speakers.size(); ++i) {
    speaker_index[corpus.speakers[i]] = static_cast<int>(i);
  }
  for (const auto& u : utts) {
    const std::string where = manifest.string() + ": utterance " + u.id;
    if (!u.alignment_path || !u.audio_path) {
      Fail(ErrorCode::kInvalidArgument, where + " needs an alignment and audio for training");
    }
    const Alignment alignment = LoadAlignment(ResolveCorpusPath(manifest, *u.alignment_path));
    Require(alignment.size() == u.phones.size(),
            where + ": alignment has " + std::to_string(alignment.size()) + " entries but " +
                std::to_string(u.phones.size()) + " phones");
    for (std::size_t i = 0; i < alignment.size(); ++i) {
      const bool match = alignment[i].IsSilence() ? u.phones.tokens[i] == kPauseSymbol
                                                  : alignment[i].phone == u.phones.tokens[i];
      Require(match, where + ": alignment phone '" + alignment[i].phone +
                         "' does not match manifest phone '" + u.phones.tokens[i] + "'");
    }
    const Waveform wav = ReadWav(ResolveCorpusPath(manifest, *u.audio_path));
    Require(wav.sample_rate == params.sample_rate,
            where + ": audio sample rate " + std::to_string(wav.sample_rate) +
                " does not match the feature configuration");
    TrainingItem item;
    item.id = u.id;
    item.mel = u.mel_path ? ReadMel(ResolveCorpusPath(manifest, *u.mel_path))
                          : ComputeMel(wav.samples, params);
    item.targets = ExtractProsodyTargets(alignment, wav.samples, params, item.mel.n_frames);
    item.input.phone_ids = u.phones.Ids();
    item.input.speaker = speaker_index.at(u.speaker_id);
    item.input.severity = u.severity;
    corpus.items.push_back(std::move(item));
  }
  return corpus;
}

Json EpochMetrics::ToJson() const {
  Json j;
  j["epoch"] = epoch;
  j["split"] = split;
  j["mel"] = loss.mel;
  j["duration"] = loss.duration;
  j["pitch"] = loss.pitch;
  j["energy"] = loss.energy;
  j["severity"] = loss.severity;
  j["total"] = loss.total;
  return j;
}

void SplitCorpus(std::size_t n, double validation_fraction, std::uint64_t seed,
                 std::vector<std::size_t>* train, std::vector<std::size_t>* validation) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(StableHash(seed, "split"));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.UniformInt(i)]);
  const auto n_val = static_cast<std::size_t>(std::lround(n * validation_fraction));
  validation->assign(order.begin(), order.begin() + std::min(n_val, n));
  train->assign(order.begin() + std::min(n_val, n), order.end());
  std::sort(validation->begin(), validation->end());
  std::sort(train->begin(), train->end());
}

namespace {

std::vector<Example> MakeExamples(const PreparedCorpus& corpus,
                                  std::span<const std::size_t> indices) {
  std::vector<Example> ex;
  for (std::size_t i : indices) {
    const TrainingItem& item = corpus.items[i];
    ex.push_back({item.input, &item.targets, &item.mel});
  }
  return ex;
}

void Accumulate(LossSummary* sum, const LossComponents<float>& c, double weight) {
  sum->mel += weight * c.mel.value()[0];
  sum->duration += weight * c.duration.value()[0];
  sum->pitch += weight * c.pitch.value()[0];
  sum->energy += weight * c.energy.value()[0];
  sum->severity += weight * c.severity.value()[0];
  sum->total += weight * c.total.value()[0];
}

void ScaleSummary(LossSummary* s, double f) {
  s->mel *= f;
  s->duration *= f;
  s->pitch *= f;
  s->energy *= f;
  s->severity *= f;
  s->total *= f;
}

}  // namespace

LossSummary Evaluate(AcousticModel<float>& model, const PreparedCorpus& corpus,
                     std::span<const std::size_t> indices, const LossWeights& weights,
                     int batch_size) {
  if (indices.empty()) Fail(ErrorCode::kInvalidArgument, "evaluate: empty split");
  Require(batch_size >= 1, "evaluate: batch_size must be >= 1");
  nn::NoGradGuard no_grad;
  LossSummary sum;
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const auto chunk =
        indices.subspan(start, std::min<std::size_t>(batch_size, indices.size() - start));
    const auto examples = MakeExamples(corpus, chunk);
    const Batch<float> batch = model.MakeBatch(examples, true);
    const Predictions<float> pred = model.Forward(batch, {}, RunMode::kTeacherForced);
    Accumulate(&sum, model.Loss(pred, batch, weights), static_cast<double>(chunk.size()));
  }
  ScaleSummary(&sum, 1.0 / static_cast<double>(indices.size()));
  return sum;
}

Adam::Adam(nn::ParameterSet<float>& params, double lr, double beta1, double beta2, double eps)
    : params_(params), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_.params()) {
    m_.emplace_back(p.var.value().shape());
    v_.emplace_back(p.var.value().shape());
  }
}

void Adam::Step() {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  auto& ps = params_.params();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    nn::Var<float>& var = ps[k].var;
    const nn::Tensor<float>& g = var.grad();
    nn::Tensor<float>& w = var.mutable_value();
    float* m = m_[k].data();
    float* v = v_[k].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      m[i] = static_cast<float>(beta1_ * m[i] + (1.0 - beta1_) * gi);
      v[i] = static_cast<float>(beta2_ * v[i] + (1.0 - beta2_) * gi * gi);
      const double update = lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
      w[i] = static_cast<float>(w[i] - update);
    }
  }
}

double ClipGradNorm(nn::ParameterSet<float>& params, double max_norm) {
  double sq = 0.0;
  for (auto& p : params.params()) {
    for (float g : p.var.grad().values()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const float scale = static_cast<float>(max_norm / norm);
    for (auto& p : params.params()) {
      for (float& g : p.var.grad().values()) g *= scale;
    }
  }
  return norm;
}

nn::GradCheckResult ModelGradCheck(const ModelConfig& config,
                                   const ModelGradCheckOptions& options) {
  Require(options.n_phonemes >= 1, "gradcheck: need at least one phoneme");
  AcousticModel<double> model(config, StableHash(options.seed, "init"));
  NormStats norm;
  norm.pitch_mean = 150.0;
  norm.pitch_std = 40.0;
  norm.energy_mean = 0.05;
  norm.energy_std = 0.02;
  model.set_norm_stats(norm);

  Rng rng(StableHash(options.seed, "input"));
  Example ex;
  ProsodyTargets targets;
  const int n_ids = model.config().n_phonemes;
  for (int i = 0; i < options.n_phonemes; ++i) {
    ex.input.phone_ids.push_back(1 + static_cast<int>(rng.UniformInt(n_ids - 1)));
    targets.durations.push_back(1 + static_cast<int>(rng.UniformInt(3)));
    targets.pitch.push_back(i % 2 == 0 ? rng.Uniform(100.0, 200.0) : 0.0);
    targets.energy.push_back(rng.Uniform(0.02, 0.08));
  }
  ex.input.speaker = static_cast<int>(rng.UniformInt(model.config().n_speakers));
  ex.input.severity = static_cast<int>(rng.UniformInt(kNumSeverities));
  for (std::size_t i = 0; i < targets.durations.size(); ++i) {
    for (int k = 0; k < targets.durations[i]; ++k) {
      targets.frame_pitch.push_back(targets.pitch[i] > 0.0 ? targets.pitch[i] + rng.Uniform(-5, 5)
                                                           : 0.0);
      targets.frame_energy.push_back(targets.energy[i] + rng.Uniform(-0.01, 0.01));
    }
  }
  MelSpectrogram mel(targets.TotalFrames(), model.config().n_mels);
  for (float& v : mel.data) v = static_cast<float>(rng.Uniform(0.0, 0.5));
  ex.targets = &targets;
  ex.mel = &mel;
  const Batch<double> batch = model.MakeBatch(std::span(&ex, 1), true);
  auto loss = [&] {
    const Predictions<double> pred = model.Forward(batch, {}, RunMode::kTeacherForced);
    return model.Loss(pred, batch, LossWeights{}).total;
  };
  auto& leaves = model.parameters().params();
  if (!options.extended_reference) return nn::GradCheck(leaves, loss, options.check);

  AcousticModel<long double> wide(config, 0);
  wide.set_norm_stats(norm);
  auto& wide_leaves = wide.parameters().params();
  Require(wide_leaves.size() == leaves.size(), "gradcheck: parameter layout mismatch");
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    wide_leaves[l].var.mutable_value() = leaves[l].var.value().Cast<long double>();
  }
  const Batch<long double> wide_batch = wide.MakeBatch(std::span(&ex, 1), true);
  nn::ReferenceLoss reference;
  reference.set = [&](std::size_t leaf, std::size_t index, long double value) {
    wide_leaves[leaf].var.mutable_value()[index] = value;
  };
  reference.evaluate = [&] {
    nn::NoGradGuard no_grad;
    const Predictions<long double> pred = wide.Forward(wide_batch, {}, RunMode::kTeacherForced);
    return wide.Loss(pred, wide_batch, LossWeights{}).total.value()[0];
  };
  return nn::GradCheck(leaves, loss, options.check, &reference);
}

TrainResult Train(const ModelConfig& model_config, const TrainConfig& config,
                  const PreparedCorpus& corpus, const TrainOptions& options) {
  config.Validate();
  Require(!corpus.items.empty(), "train: empty corpus");
  ModelConfig mc = model_config;
  mc.n_speakers = static_cast<int>(corpus.speakers.size());
  mc.Validate();

  TrainResult result;
  SplitCorpus(corpus.items.size(), config.validation_fraction, config.seed,
              &result.train_indices, &result.validation_indices);
  if (result.train_indices.empty()) {
    Fail(ErrorCode::kInvalidArgument, "train: validation split leaves no training data");
  }

  std::vector<ProsodyTargets> train_targets;
  for (std::size_t i : result.train_indices) train_targets.push_back(corpus.items[i].targets);

  result.model = std::make_unique<AcousticModel<float>>(mc, StableHash(config.seed, "init"));
  AcousticModel<float>& model = *result.model;
  model.set_norm_stats(ComputeNormalization(train_targets));
  model.set_dropout_seed(StableHash(config.seed, "dropout"));
  Adam adam(model.parameters(), config.learning_rate, config.beta1, config.beta2,
            config.adam_eps);

  std::ofstream metrics;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    metrics.open(*options.out_dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
    if (!metrics)
      Fail(ErrorCode::kIo, "cannot write " + (*options.out_dir / "metrics.jsonl").string());
    Json split;
    auto ids = [&](const std::vector<std::size_t>& idx) {
      Json a = Json::array();
      for (std::size_t i : idx) a.push_back(corpus.items[i].id);
      return a;
    };
    split["train"] = ids(result.train_indices);
    split["validation"] = ids(result.validation_indices);
    WriteTextFile(*options.out_dir / "split.json", split.dump(2) + "\n");
  }
  auto log = [&](const EpochMetrics& m) {
    result.history.push_back(m);
    if (metrics.is_open()) metrics << m.ToJson().dump() << "\n" << std::flush;
    if (options.on_epoch) options.on_epoch(m);
  };

  Rng speaker_rng(StableHash(config.seed, "speaker_dropout"));
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order = result.train_indices;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng shuffle(StableHash(config.seed, "epoch", static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle.UniformInt(i)]);

    LossSummary train_sum;
    int batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t n = std::min<std::size_t>(config.batch_size, order.size() - start);
      auto examples = MakeExamples(corpus, std::span(order).subspan(start, n));
      for (auto& ex : examples)
        ex.input.use_speaker = !speaker_rng.Bernoulli(config.speaker_dropout);
      const Batch<float> batch = model.MakeBatch(examples, true);
      const Predictions<float> pred = model.Forward(batch, {}, RunMode::kTrain);
      const LossComponents<float> loss = model.Loss(pred, batch, config.loss_weights);
      const float total = loss.total.value()[0];
      if (!std::isfinite(total)) {
        Fail(ErrorCode::kNumeric, "train: non-finite loss at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(batch_no) + " (mel " +
                                      std::to_string(loss.mel.value()[0]) + ", duration " +
                                      std::to_string(loss.duration.value()[0]) + ")");
      }
      Accumulate(&train_sum, loss, static_cast<double>(n));
      model.parameters().ZeroGrad();
      nn::Backward(loss.total);
      ClipGradNorm(model.parameters(), config.grad_clip);
      adam.Step();
    }
    ScaleSummary(&train_sum, 1.0 / static_cast<double>(order.size()));
    log({epoch, "train", train_sum});

    double score = train_sum.total;
    if (!result.validation_indices.empty()) {
      const LossSummary val = Evaluate(model, corpus, result.validation_indices,
                                       config.loss_weights, config.batch_size);
      log({epoch, "validation", val});
      score = val.total;
    }
    if (score < best) {
      best = score;
      result.best_epoch = epoch;
      result.best_parameters = nn::SnapshotParameters(model.parameters());
      if (options.out_dir) SaveModelBundle(model, corpus.speakers, *options.out_dir / "best.ckpt");
    }
  }
  if (options.out_dir) SaveModelBundle(model, corpus.speakers, *options.out_dir / "last.ckpt");
  return result;
}

}  // namespace dystts
