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

#include "cli_app.h"

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dystts/augmentation.h"
#include "dystts/error.h"
#include "dystts/lexicon.h"
#include "dystts/model_bundle.h"
#include "dystts/pause_model.h"
#include "dystts/plot.h"
#include "dystts/synth_pipeline.h"
#include "dystts/toy_corpus.h"
#include "dystts/trainer.h"
#include "dystts/vocoder.h"

namespace dystts::cli {
namespace {

namespace fs = std::filesystem;

struct Config {
  FrameParams features;
  ModelConfig model;
  TrainConfig train;
  ToyCorpusSpec toy;
  std::optional<std::string> pause_stats_path;
  double pause_min_ms = kDefaultPauseMinMs;
  std::string augment_preset = "exp1";
  std::optional<CoefficientGrid> augment_grid;
  int augment_multiplier = 3;
  bool augment_wav = false;

  Json ToJson() const {
    Json j;
    j["features"] = {{"sample_rate", features.sample_rate}, {"win_length", features.win_length},
                     {"hop_length", features.hop_length},   {"n_mels", features.n_mels},
                     {"fmin", features.fmin},               {"fmax", features.fmax}};
    j["model"] = model.ToJson();
    j["train"] = train.ToJson();
    j["toy"] = toy.ToJson();
    j["pause"] = {{"stats_path", pause_stats_path ? Json(*pause_stats_path) : Json(nullptr)},
                  {"pause_min_ms", pause_min_ms}};
    Json aug;
    if (augment_grid) {
      aug["grid"] = augment_grid->ToJson();
    } else {
      aug["preset"] = augment_preset;
    }
    aug["multiplier"] = augment_multiplier;
    aug["write_wav"] = augment_wav;
    j["augment"] = aug;
    return j;
  }
};

FrameParams FeaturesFromJson(const Json& j) {
  Require(j.is_object(), "config: features must be an object");
  FrameParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "sample_rate") {
      p.sample_rate = value.get<int>();
    } else if (key == "win_length") {
      p.win_length = value.get<int>();
    } else if (key == "hop_length") {
      p.hop_length = value.get<int>();
    } else if (key == "n_mels") {
      p.n_mels = value.get<int>();
    } else if (key == "fmin") {
      p.fmin = value.get<double>();
    } else if (key == "fmax") {
      p.fmax = value.get<double>();
    } else {
      Fail(ErrorCode::kInvalidArgument, "config: unknown features key '" + key + "'");
    }
  }
  p.Validate();
  return p;
}

Config LoadConfig(const std::string& path) {
  Config c;
  if (path.empty()) return c;
  Json j;
  try {
    j = Json::parse(ReadTextFile(path));
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kParse, path + ": malformed config: " + e.what());
  }
  Require(j.is_object(), path + ": config must be a JSON object");
  try {
    for (const auto& [section, value] : j.items()) {
      if (section == "features") {
        c.features = FeaturesFromJson(value);
      } else if (section == "model") {
        c.model = ModelConfig::FromJson(value);
      } else if (section == "train") {
        c.train = TrainConfig::FromJson(value);
      } else if (section == "toy") {
        c.toy = ToyCorpusSpec::FromJson(value);
      } else if (section == "pause") {
        for (const auto& [key, v] : value.items()) {
          if (key == "stats_path") {
            if (!v.is_null()) c.pause_stats_path = v.get<std::string>();
          } else if (key == "pause_min_ms") {
            c.pause_min_ms = v.get<double>();
          } else {
            Fail(ErrorCode::kInvalidArgument, "config: unknown pause key '" + key + "'");
          }
        }
      } else if (section == "augment") {
        for (const auto& [key, v] : value.items()) {
          if (key == "preset") {
            c.augment_preset = v.get<std::string>();
          } else if (key == "grid") {
            c.augment_grid = CoefficientGrid::FromJson(v);
          } else if (key == "multiplier") {
            c.augment_multiplier = v.get<int>();
          } else if (key == "write_wav") {
            c.augment_wav = v.get<bool>();
          } else {
            Fail(ErrorCode::kInvalidArgument, "config: unknown augment key '" + key + "'");
          }
        }
      } else {
        Fail(ErrorCode::kInvalidArgument, "config: unknown section '" + section + "'");
      }
    }
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, path + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
  return c;
}

fs::path ManifestPath(const std::string& corpus) {
  const fs::path p(corpus);
  if (fs::is_directory(p)) return p / kManifestName;
  return p;
}

SeverityPauseStats LoadPauseStats(const std::optional<std::string>& path) {
  if (!path) return SeverityPauseStats::Defaults();
  try {
    return SeverityPauseStats::FromJson(Json::parse(ReadTextFile(*path)));
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kParse, *path + ": " + e.what());
  }
}

// "B AE D | AE N D": tokens separated by spaces, words by '|'.
PhonemeSequence ParsePhones(const std::string& text) {
  PhonemeSequence seq;
  std::istringstream in(text);
  std::string tok;
  int word = 0;
  bool pending_break = false;
  while (in >> tok) {
    if (tok == "|") {
      pending_break = !seq.empty();
      continue;
    }
    if (pending_break) {
      ++word;
      pending_break = false;
    }
    if (PhonemeId(tok) < 0) Fail(ErrorCode::kInvalidArgument, "unknown phoneme '" + tok + "'");
    seq.tokens.push_back(tok);
    seq.word_index.push_back(word);
  }
  Require(!seq.empty(), "no phonemes given");
  ValidatePhonemeSequence(seq);
  return seq;
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void LogConfig(std::ostream& err, const std::string& command, const Config& c,
               const Json& extra) {
  Json j = c.ToJson();
  j["command"] = command;
  j["args"] = extra;
  err << "resolved config: " << j.dump() << "\n";
}

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string corpus;
  std::string checkpoint;
  std::optional<double> pause_min_ms;
  // toy-gen
  std::optional<int> speakers_per_severity, utterances_per_speaker;
  // train
  std::optional<int> epochs, batch_size;
  std::optional<double> learning_rate;
  // gradcheck
  int gc_hidden = 8, gc_blocks = 1, gc_filter = 16, gc_phonemes = 4;
  std::size_t gc_max_entries = 0;
  double gc_eps = 1e-5;
  bool gc_double_reference = false;
  // synth
  std::string speaker, text, phones, pause = "off", pause_stats;
  int severity = 0;
  double pitch = 1.0, energy = 1.0, duration = 1.0;
  bool wav = false, plot = false, letter_fallback = false;
  // augment
  std::optional<std::string> preset;
  std::optional<int> multiplier;
  // vocode / plot
  std::vector<std::string> mels, reports;
  int iters = 60;
  int column_width = 1;
};

int ToyGen(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  if (f.seed) c.toy.base_seed = *f.seed;
  if (f.speakers_per_severity) c.toy.n_speakers_per_severity = *f.speakers_per_severity;
  if (f.utterances_per_speaker) c.toy.n_utterances_per_speaker = *f.utterances_per_speaker;
  c.toy.Validate();
  LogConfig(err, "toy-gen", c, {{"out", f.out}});
  const auto manifest = GenerateToyCorpus(c.toy, c.features, f.out);
  WriteTextFile(fs::path(f.out) / "toy_spec.json", c.toy.ToJson().dump(2) + "\n");
  out << "wrote " << manifest.size() << " utterances to " << f.out << "\n";
  return kExitOk;
}

int Analyze(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  if (f.pause_min_ms) c.pause_min_ms = *f.pause_min_ms;
  Require(c.pause_min_ms >= 0.0, "--pause-min-ms must be >= 0");
  LogConfig(err, "analyze", c, {{"corpus", f.corpus}});
  const fs::path manifest = ManifestPath(f.corpus);
  const auto utts = LoadManifest(manifest);
  std::vector<AlignedUtterance> aligned;
  std::array<int, kNumSeverities> counts{};
  for (const auto& u : utts) {
    if (!u.alignment_path) {
      Fail(ErrorCode::kInvalidArgument, "utterance " + u.id + " has no alignment");
    }
    aligned.push_back({u.severity, LoadAlignment(ResolveCorpusPath(manifest, *u.alignment_path))});
    ++counts[u.severity];
  }
  const SeverityPauseStats stats = EstimatePauseStats(aligned, c.pause_min_ms);
  out << "severity  label     utterances  pauses/utt  slots/utt  p(slot)\n";
  for (int s = 0; s < kNumSeverities; ++s) {
    const auto& g = stats.groups[s];
    char line[160];
    std::snprintf(line, sizeof(line), "%-8d  %-8s  %10d  %10s  %9s  %7s\n", s, SeverityName(s),
                  counts[s], Fixed(g.pauses_per_utterance).c_str(),
                  Fixed(g.slots_per_utterance).c_str(), Fixed(g.SlotProbability()).c_str());
    out << line;
  }
  if (!f.out.empty()) WriteTextFile(f.out, stats.ToJson().dump(2) + "\n");
  return kExitOk;
}

int TrainCommand(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  if (f.seed) c.train.seed = *f.seed;
  if (f.epochs) c.train.epochs = *f.epochs;
  if (f.batch_size) c.train.batch_size = *f.batch_size;
  if (f.learning_rate) c.train.learning_rate = *f.learning_rate;
  c.train.Validate();
  LogConfig(err, "train", c, {{"corpus", f.corpus}, {"out", f.out}});
  const PreparedCorpus corpus = PrepareCorpus(ManifestPath(f.corpus), c.features);
  fs::create_directories(f.out);
  WriteTextFile(fs::path(f.out) / "resolved_config.json", c.ToJson().dump(2) + "\n");
  TrainOptions options;
  options.out_dir = f.out;
  options.on_epoch = [&](const EpochMetrics& m) { out << m.ToJson().dump() << "\n" << std::flush; };
  const TrainResult result = Train(c.model, c.train, corpus, options);
  out << "best epoch " << result.best_epoch << "; checkpoints in " << f.out << "\n";
  return kExitOk;
}

int GradCheckCommand(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  ModelConfig mc = c.model;
  mc.hidden = f.gc_hidden;
  mc.n_encoder_blocks = f.gc_blocks;
  mc.n_decoder_blocks = f.gc_blocks;
  mc.ff_filter = f.gc_filter;
  mc.n_speakers = 2;
  mc.Validate();
  ModelGradCheckOptions options;
  options.n_phonemes = f.gc_phonemes;
  options.seed = f.seed.value_or(0);
  options.check.eps = f.gc_eps;
  options.check.max_entries_per_parameter = f.gc_max_entries;
  options.check.seed = options.seed;
  options.extended_reference = !f.gc_double_reference;
  Json args = {{"hidden", f.gc_hidden}, {"blocks", f.gc_blocks}, {"ff_filter", f.gc_filter},
               {"phonemes", f.gc_phonemes}, {"eps", f.gc_eps}, {"max_entries", f.gc_max_entries},
               {"seed", options.seed}, {"extended_reference", options.extended_reference}};
  LogConfig(err, "gradcheck", c, args);
  const nn::GradCheckResult r = ModelGradCheck(mc, options);
  out << "entries checked: " << r.entries_checked << " (" << r.entries_at_kinks
      << " skipped at Relu kinks)\n";
  out << "max relative error: " << std::scientific << std::setprecision(3)
      << r.max_relative_error << " at " << r.worst_parameter << "[" << r.worst_index
      << "] (analytic " << r.worst_analytic << ", numeric " << r.worst_numeric << ")\n"
      << std::defaultfloat;
  if (r.max_relative_error >= 1e-4) {
    out << "FAIL: threshold 1e-4\n";
    return kExitValidation;
  }
  out << "PASS: threshold 1e-4\n";
  return kExitOk;
}

PauseCountMode ApplyPauseFlag(const std::string& pause, SynthesisControls& controls) {
  if (pause == "off") {
    controls.pause_insertion = false;
  } else if (pause == "on") {
    controls.pause_insertion = true;
    controls.pause_mode = PauseCountMode::kStochastic;
  } else if (pause == "det") {
    controls.pause_insertion = true;
    controls.pause_mode = PauseCountMode::kDeterministic;
  } else {
    Fail(ErrorCode::kInvalidArgument, "--pause must be on, off or det");
  }
  return controls.pause_mode;
}

int Synth(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  SynthesisControls controls;
  controls.pitch_coef = f.pitch;
  controls.energy_coef = f.energy;
  controls.duration_coef = f.duration;
  controls.severity = f.severity;
  controls.seed = f.seed.value_or(0);
  ApplyPauseFlag(f.pause, controls);
  controls.Validate();
  if (!f.pause_stats.empty()) c.pause_stats_path = f.pause_stats;
  Require(f.text.empty() != f.phones.empty(), "give exactly one of --text or --phones");
  LogConfig(err, "synth", c,
            {{"checkpoint", f.checkpoint},
             {"speaker", f.speaker},
             {"controls", controls.ToJson()},
             {"text", f.text},
             {"phones", f.phones},
             {"out", f.out}});
  LexiconOptions lex;
  lex.letter_fallback = f.letter_fallback;
  const PhonemeSequence phones =
      f.text.empty() ? ParsePhones(f.phones) : TextToPhonemes(f.text, lex);
  ModelBundle bundle = LoadModelBundle(f.checkpoint);
  const SynthesisResult result =
      Synthesize(bundle, phones, f.speaker, controls, LoadPauseStats(c.pause_stats_path));
  const fs::path prefix(f.out);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  WriteMel(result.mel, fs::path(f.out + ".mel"));
  WriteTextFile(f.out + ".json", result.report.ToJson().dump(2) + "\n");
  if (f.wav) {
    GriffinLimOptions gl;
    gl.n_iters = f.iters;
    gl.seed = controls.seed;
    WriteWav(f.out + ".wav", GriffinLim(result.mel, c.features, gl), c.features.sample_rate);
  }
  if (f.plot) {
    PlotOptions po;
    po.column_width = f.column_width;
    WritePpm(f.out + ".ppm", RenderSpectrogram(result.mel, &result.report, po));
  }
  out << "synthesized " << result.report.total_frames << " frames, "
      << result.report.inserted_pauses.size() << " inserted pauses -> " << f.out << ".mel\n";
  return kExitOk;
}

int Augment(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  if (f.preset) {
    c.augment_preset = *f.preset;
    c.augment_grid.reset();
  }
  if (f.multiplier) c.augment_multiplier = *f.multiplier;
  if (f.wav) c.augment_wav = true;
  if (!f.pause_stats.empty()) c.pause_stats_path = f.pause_stats;
  const std::uint64_t seed = f.seed.value_or(0);
  const CoefficientGrid grid = c.augment_grid ? *c.augment_grid : BuildGrid(c.augment_preset);
  LogConfig(err, "augment", c,
            {{"corpus", f.corpus}, {"checkpoint", f.checkpoint}, {"out", f.out}, {"seed", seed}});
  const fs::path manifest = ManifestPath(f.corpus);
  const auto corpus = LoadManifest(manifest);
  const AugmentationPlan plan = SamplePlan(grid, corpus, c.augment_multiplier, seed);
  ModelBundle bundle = LoadModelBundle(f.checkpoint);
  RunOptions options;
  options.features = c.features;
  options.write_wav = c.augment_wav;
  options.griffin_lim_iters = f.iters;
  const RunResult result = RunPlan(plan, corpus, manifest, bundle,
                                   LoadPauseStats(c.pause_stats_path), f.out, options);
  WriteTextFile(fs::path(f.out) / "plan.json", plan.ToJson().dump(2) + "\n");
  out << "manifest: " << result.manifest.size() << " records (" << corpus.size() << " original, "
      << result.manifest.size() - corpus.size() << " synthetic)\n";
  if (result.partial()) {
    out << result.failures.size() << " entries failed; see "
        << (fs::path(f.out) / "failures.json").string() << "\n";
    for (const auto& fail : result.failures)
      err << "failed " << fail.output_id << ": " << fail.message << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

int Vocode(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  Require(f.mels.size() == 1, "vocode takes exactly one --mel");
  GriffinLimOptions gl;
  gl.n_iters = f.iters;
  gl.seed = f.seed.value_or(0);
  LogConfig(err, "vocode", c,
            {{"mel", f.mels[0]}, {"out", f.out}, {"iters", f.iters}, {"seed", gl.seed}});
  const auto samples = GriffinLim(ReadMel(f.mels[0]), c.features, gl);
  WriteWav(f.out, samples, c.features.sample_rate);
  out << "wrote " << samples.size() << " samples to " << f.out << "\n";
  return kExitOk;
}

int Plot(const Flags& f, Config& c, std::ostream& out, std::ostream& err) {
  Require(!f.mels.empty(), "plot needs at least one --mel");
  Require(f.reports.empty() || f.reports.size() == f.mels.size(),
          "give one --report per --mel, or none");
  LogConfig(err, "plot", c, {{"mel", f.mels}, {"report", f.reports}, {"out", f.out}});
  PlotOptions po;
  po.column_width = f.column_width;
  std::vector<RgbImage> panels;
  for (std::size_t i = 0; i < f.mels.size(); ++i) {
    const MelSpectrogram mel = ReadMel(f.mels[i]);
    std::optional<SynthesisReport> report;
    if (!f.reports.empty()) {
      try {
        report = SynthesisReport::FromJson(Json::parse(ReadTextFile(f.reports[i])));
      } catch (const Json::parse_error& e) {
        Fail(ErrorCode::kParse, f.reports[i] + ": " + e.what());
      }
    }
    panels.push_back(RenderSpectrogram(mel, report ? &*report : nullptr, po));
  }
  const RgbImage img = StackPanels(panels);
  WritePpm(f.out, img);
  out << "wrote " << img.width << "x" << img.height << " image to " << f.out << "\n";
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
      return kExitValidation;
    default:
      return kExitFailure;
  }
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Severity-controllable dysarthric speech synthesis and data augmentation.",
               "dystts"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", f.config_path,
                 "JSON config with features/model/train/toy/pause/augment sections")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "Seed for every random choice of the command");

  auto* toy = app.add_subcommand("toy-gen", "Generate the procedural toy corpus");
  toy->add_option("--out", f.out, "Output directory")->required();
  toy->add_option("--speakers-per-severity", f.speakers_per_severity,
                  "Speakers per severity group");
  toy->add_option("--utterances-per-speaker", f.utterances_per_speaker, "Utterances per speaker");

  auto* analyze =
      app.add_subcommand("analyze", "Per-severity pause statistics of an aligned corpus");
  analyze->add_option("--corpus", f.corpus, "Corpus directory or manifest")->required();
  analyze->add_option("--pause-min-ms", f.pause_min_ms,
                      "Minimum silence length counted as a pause");
  analyze->add_option("--out", f.out, "Write the statistics as JSON");

  auto* train = app.add_subcommand("train", "Train the acoustic model");
  train->add_option("--corpus", f.corpus, "Corpus directory or manifest")->required();
  train->add_option("--out", f.out, "Output directory for checkpoints and metrics")->required();
  train->add_option("--epochs", f.epochs, "Number of epochs");
  train->add_option("--batch-size", f.batch_size, "Utterances per batch");
  train->add_option("--learning-rate", f.learning_rate, "Adam learning rate");

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the model gradient");
  gc->add_option("--hidden", f.gc_hidden, "Hidden size")->capture_default_str();
  gc->add_option("--blocks", f.gc_blocks, "Encoder and decoder blocks")->capture_default_str();
  gc->add_option("--ff-filter", f.gc_filter, "Feed-forward filter size")->capture_default_str();
  gc->add_option("--phonemes", f.gc_phonemes, "Input length")->capture_default_str();
  gc->add_option("--max-entries", f.gc_max_entries, "Entries per parameter to check (0 = all)")
      ->capture_default_str();
  gc->add_option("--eps", f.gc_eps, "Finite-difference step")->capture_default_str();
  gc->add_flag("--double-reference", f.gc_double_reference,
               "Take finite differences in 64-bit instead of extended precision");

  auto* synth = app.add_subcommand("synth", "Synthesize one utterance");
  synth->add_option("--checkpoint", f.checkpoint, "Model checkpoint")->required();
  synth->add_option("--speaker", f.speaker, "Speaker name")->required();
  synth->add_option("--text", f.text, "Input text (lexicon lookup)");
  synth->add_option("--phones", f.phones, "Input phonemes, words separated by '|'");
  synth->add_option("--severity", f.severity, "Severity level 0, 1 or 2")->capture_default_str();
  synth->add_option("--pitch", f.pitch, "Pitch coefficient in [0, 2]")->capture_default_str();
  synth->add_option("--energy", f.energy, "Energy coefficient in [0, 2]")->capture_default_str();
  synth->add_option("--duration", f.duration, "Duration coefficient in [0, 2]")
      ->capture_default_str();
  synth->add_option("--pause", f.pause, "Pause insertion: on, off or det")
      ->check(CLI::IsMember({"on", "off", "det"}))
      ->capture_default_str();
  synth->add_option("--pause-stats", f.pause_stats, "Pause statistics JSON (default: built-in)");
  synth->add_option("--out", f.out, "Output prefix for .mel/.json (and .wav/.ppm)")->required();
  synth->add_flag("--wav", f.wav, "Also write a Griffin-Lim waveform");
  synth->add_flag("--plot", f.plot, "Also write a spectrogram plot");
  synth->add_flag("--letter-fallback", f.letter_fallback, "Spell unknown words letter by letter");
  synth->add_option("--iters", f.iters, "Griffin-Lim iterations")->capture_default_str();
  synth->add_option("--column-width", f.column_width, "Plot pixels per frame")
      ->capture_default_str();

  auto* augment = app.add_subcommand("augment", "Synthesize an augmented corpus");
  augment->add_option("--corpus", f.corpus, "Corpus directory or manifest")->required();
  augment->add_option("--checkpoint", f.checkpoint, "Model checkpoint")->required();
  augment->add_option("--preset", f.preset, "Coefficient grid preset")
      ->check(CLI::IsMember({"exp1", "exp2"}));
  augment->add_option("--multiplier", f.multiplier, "Synthetic utterances per original");
  augment->add_option("--pause-stats", f.pause_stats, "Pause statistics JSON (default: built-in)");
  augment->add_option("--out", f.out, "Output directory")->required();
  augment->add_flag("--wav", f.wav, "Also write Griffin-Lim waveforms");
  augment->add_option("--iters", f.iters, "Griffin-Lim iterations")->capture_default_str();

  auto* vocode = app.add_subcommand("vocode", "Griffin-Lim waveform from a mel file");
  vocode->add_option("--mel", f.mels, "Mel file")->required();
  vocode->add_option("--out", f.out, "Output WAV")->required();
  vocode->add_option("--iters", f.iters, "Griffin-Lim iterations")->capture_default_str();

  auto* plot = app.add_subcommand("plot", "Render mel spectrograms as a PPM image");
  plot->add_option("--mel", f.mels, "Mel file; repeat for stacked panels")->required();
  plot->add_option("--report", f.reports, "Synthesis report per mel for overlays");
  plot->add_option("--out", f.out, "Output PPM")->required();
  plot->add_option("--column-width", f.column_width, "Pixels per frame")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    Config c = LoadConfig(f.config_path);
    if (toy->parsed()) return ToyGen(f, c, out, err);
    if (analyze->parsed()) return Analyze(f, c, out, err);
    if (train->parsed()) return TrainCommand(f, c, out, err);
    if (gc->parsed()) return GradCheckCommand(f, c, out, err);
    if (synth->parsed()) return Synth(f, c, out, err);
    if (augment->parsed()) return Augment(f, c, out, err);
    if (vocode->parsed()) return Vocode(f, c, out, err);
    if (plot->parsed()) return Plot(f, c, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace dystts::cli
