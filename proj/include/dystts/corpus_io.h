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

#ifndef DYSTTS_CORPUS_IO_H_
#define DYSTTS_CORPUS_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dystts/phonemes.h"

namespace dystts {

using Json = nlohmann::ordered_json;

inline constexpr int kNumSeverities = 3;
inline constexpr int kNumMels = 80;

// Severity labels: 0 = Normal, 1 = Low dysarthria, 2 = Moderate dysarthria.
const char* SeverityName(int severity);

struct Utterance {
  std::string id;
  std::string speaker_id;
  int severity = 0;
  std::string text;
  PhonemeSequence phones;
  // Stored as written in the manifest; relative paths resolve against the
  // manifest's directory (see ResolveCorpusPath).
  std::optional<std::string> alignment_path;
  std::optional<std::string> mel_path;
  std::optional<std::string> audio_path;

  // Present only in augmented manifests.
  bool synthetic = false;
  std::optional<std::string> source_id;
  std::optional<Json> controls;
};

struct AlignmentEntry {
  std::string phone;
  double start = 0.0;
  double end = 0.0;
  int word = 0;

  double Duration() const { return end - start; }
  bool IsSilence() const { return phone == kSilenceSymbol; }
};

using Alignment = std::vector<AlignmentEntry>;

// frames x n_mels, row-major.
struct MelSpectrogram {
  std::size_t n_frames = 0;
  std::size_t n_mels = kNumMels;
  std::vector<float> data;

  MelSpectrogram() = default;
  MelSpectrogram(std::size_t frames, std::size_t mels)
      : n_frames(frames), n_mels(mels), data(frames * mels, 0.0f) {}

  float& at(std::size_t frame, std::size_t mel) {
    return data[frame * n_mels + mel];
  }
  float at(std::size_t frame, std::size_t mel) const {
    return data[frame * n_mels + mel];
  }
};

// Manifest: one JSON object per line.
// With augmentation_keys, synthetic/source_id/controls are written even for
// original records.
Json UtteranceToJson(const Utterance& utt, bool augmentation_keys = false);
Utterance UtteranceFromJson(const Json& j);
std::vector<Utterance> LoadManifest(const std::filesystem::path& path);
void SaveManifest(const std::vector<Utterance>& utterances,
                  const std::filesystem::path& path, bool augmentation_keys = false);
std::filesystem::path ResolveCorpusPath(const std::filesystem::path& manifest,
                                        const std::string& stored);

// Alignment: one {"phone","start","end","word"} object per line.
void ValidateAlignment(const Alignment& alignment);
Alignment LoadAlignment(const std::filesystem::path& path);
void SaveAlignment(const Alignment& alignment,
                   const std::filesystem::path& path);

// Mel file: "MELF" | u16 version | u32 n_frames | u32 n_mels | f32 payload,
// all little-endian.
std::vector<std::uint8_t> EncodeMel(const MelSpectrogram& mel);
MelSpectrogram DecodeMel(const std::vector<std::uint8_t>& bytes);
void WriteMel(const MelSpectrogram& mel, const std::filesystem::path& path);
MelSpectrogram ReadMel(const std::filesystem::path& path);

// Whole-file helpers shared by the binary formats.
std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    const std::vector<std::uint8_t>& bytes);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace dystts

#endif  // DYSTTS_CORPUS_IO_H_
