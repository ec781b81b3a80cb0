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

#include "dystts/corpus_io.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dystts/byte_io.h"
#include "dystts/error.h"

namespace dystts {
namespace fs = std::filesystem;

namespace {

constexpr char kMelMagic[] = "MELF";
constexpr std::uint16_t kMelVersion = 1;

std::string LineContext(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

Json OptionalString(const std::optional<std::string>& s) {
  return s ? Json(*s) : Json(nullptr);
}

std::optional<std::string> ReadOptionalString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

template <typename Fn>
void ForEachJsonLine(const fs::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kParse,
           LineContext(path, line_no) + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) {
      Fail(ErrorCode::kParse,
           LineContext(path, line_no) + ": expected a JSON object");
    }
    try {
      fn(j, line_no);
    } catch (const Json::exception& e) {
      Fail(ErrorCode::kParse,
           LineContext(path, line_no) + ": bad field: " + e.what());
    } catch (const Error& e) {
      Fail(e.code(), LineContext(path, line_no) + ": " + e.what());
    }
  }
}

}  // namespace

const char* SeverityName(int severity) {
  switch (severity) {
    case 0:
      return "Normal";
    case 1:
      return "Low";
    case 2:
      return "Moderate";
  }
  return "Unknown";
}

Json UtteranceToJson(const Utterance& utt, bool augmentation_keys) {
  Json j;
  j["id"] = utt.id;
  j["speaker"] = utt.speaker_id;
  j["severity"] = utt.severity;
  j["text"] = utt.text;
  j["phones"] = utt.phones.tokens;
  j["word_index"] = utt.phones.word_index;
  j["alignment"] = OptionalString(utt.alignment_path);
  j["mel"] = OptionalString(utt.mel_path);
  j["audio"] = OptionalString(utt.audio_path);
  if (augmentation_keys || utt.synthetic || utt.source_id || utt.controls) {
    j["synthetic"] = utt.synthetic;
    j["source_id"] = OptionalString(utt.source_id);
    j["controls"] = utt.controls ? *utt.controls : Json(nullptr);
  }
  return j;
}

Utterance UtteranceFromJson(const Json& j) {
  Utterance u;
  for (const char* key : {"id", "speaker", "severity", "text"}) {
    if (!j.contains(key)) {
      Fail(ErrorCode::kParse, std::string("missing required field '") + key + "'");
    }
  }
  u.id = j.at("id").get<std::string>();
  u.speaker_id = j.at("speaker").get<std::string>();
  u.severity = j.at("severity").get<int>();
  if (u.severity < 0 || u.severity >= kNumSeverities) {
    Fail(ErrorCode::kInvalidArgument,
         "severity out of range {0,1,2}: " + std::to_string(u.severity));
  }
  u.text = j.at("text").get<std::string>();
  if (j.contains("phones")) u.phones.tokens = j.at("phones").get<std::vector<std::string>>();
  if (j.contains("word_index")) {
    u.phones.word_index = j.at("word_index").get<std::vector<int>>();
  }
  ValidatePhonemeSequence(u.phones);
  if (!u.text.empty() && u.phones.empty()) {
    Fail(ErrorCode::kInvalidArgument, "utterance " + u.id + " has text but no phones");
  }
  u.alignment_path = ReadOptionalString(j, "alignment");
  u.mel_path = ReadOptionalString(j, "mel");
  u.audio_path = ReadOptionalString(j, "audio");
  if (j.contains("synthetic")) u.synthetic = j.at("synthetic").get<bool>();
  u.source_id = ReadOptionalString(j, "source_id");
  if (j.contains("controls") && !j.at("controls").is_null()) {
    u.controls = j.at("controls");
  }
  return u;
}

std::vector<Utterance> LoadManifest(const fs::path& path) {
  std::vector<Utterance> out;
  std::unordered_set<std::string> seen;
  ForEachJsonLine(path, [&](const Json& j, std::size_t) {
    Utterance u = UtteranceFromJson(j);
    if (!seen.insert(u.id).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate utterance id '" + u.id + "'");
    }
    out.push_back(std::move(u));
  });
  return out;
}

void SaveManifest(const std::vector<Utterance>& utterances, const fs::path& path,
                  bool augmentation_keys) {
  std::unordered_set<std::string> seen;
  std::string text;
  for (const auto& u : utterances) {
    Require(seen.insert(u.id).second, "duplicate utterance id '" + u.id + "'");
    text += UtteranceToJson(u, augmentation_keys).dump();
    text += '\n';
  }
  WriteTextFile(path, text);
}

fs::path ResolveCorpusPath(const fs::path& manifest, const std::string& stored) {
  fs::path p(stored);
  if (p.is_absolute()) return p;
  return manifest.parent_path() / p;
}

void ValidateAlignment(const Alignment& alignment) {
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    const auto& e = alignment[i];
    const std::string where = "alignment entry " + std::to_string(i);
    if (!(e.start >= 0.0) || !(e.end >= 0.0) || !std::isfinite(e.start) ||
        !std::isfinite(e.end)) {
      Fail(ErrorCode::kInvalidArgument, where + ": negative or non-finite time");
    }
    if (!(e.end > e.start)) {
      Fail(ErrorCode::kInvalidArgument, where + ": end must exceed start");
    }
    if (e.word < 0) Fail(ErrorCode::kInvalidArgument, where + ": negative word index");
    if (i > 0) {
      const auto& prev = alignment[i - 1];
      if (e.start < prev.start) {
        Fail(ErrorCode::kInvalidArgument, where + ": entries not sorted by start");
      }
      if (prev.end > e.start) {
        Fail(ErrorCode::kInvalidArgument, where + ": overlaps previous entry");
      }
      if (e.word < prev.word) {
        Fail(ErrorCode::kInvalidArgument, where + ": word index decreases");
      }
    }
  }
}

Alignment LoadAlignment(const fs::path& path) {
  Alignment out;
  ForEachJsonLine(path, [&](const Json& j, std::size_t) {
    AlignmentEntry e;
    e.phone = j.at("phone").get<std::string>();
    e.start = j.at("start").get<double>();
    e.end = j.at("end").get<double>();
    e.word = j.at("word").get<int>();
    out.push_back(std::move(e));
  });
  try {
    ValidateAlignment(out);
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
  return out;
}

void SaveAlignment(const Alignment& alignment, const fs::path& path) {
  ValidateAlignment(alignment);
  std::string text;
  for (const auto& e : alignment) {
    Json j;
    j["phone"] = e.phone;
    j["start"] = e.start;
    j["end"] = e.end;
    j["word"] = e.word;
    text += j.dump();
    text += '\n';
  }
  WriteTextFile(path, text);
}

std::vector<std::uint8_t> EncodeMel(const MelSpectrogram& mel) {
  Require(mel.n_frames >= 1, "mel: n_frames must be >= 1");
  Require(mel.n_mels == kNumMels, "mel: n_mels must be 80");
  Require(mel.data.size() == mel.n_frames * mel.n_mels,
          "mel: data length does not match dimensions");
  ByteWriter w;
  w.Raw(kMelMagic);
  w.U16(kMelVersion);
  w.U32(static_cast<std::uint32_t>(mel.n_frames));
  w.U32(static_cast<std::uint32_t>(mel.n_mels));
  for (float v : mel.data) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNumeric, "mel: non-finite value");
    w.F32(v);
  }
  return std::move(w.bytes());
}

MelSpectrogram DecodeMel(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "mel");
  if (r.remaining() < 4 || r.Raw(4) != kMelMagic) {
    Fail(ErrorCode::kParse, "mel: bad magic");
  }
  const std::uint16_t version = r.U16();
  if (version != kMelVersion) {
    Fail(ErrorCode::kParse, "mel: unsupported version " + std::to_string(version));
  }
  MelSpectrogram mel;
  mel.n_frames = r.U32();
  mel.n_mels = r.U32();
  const std::uint64_t count =
      static_cast<std::uint64_t>(mel.n_frames) * mel.n_mels;
  if (r.remaining() != count * 4) {
    Fail(ErrorCode::kParse, "mel: dimensions " + std::to_string(mel.n_frames) +
                                "x" + std::to_string(mel.n_mels) +
                                " do not match payload length");
  }
  if (mel.n_mels != kNumMels || mel.n_frames == 0) {
    Fail(ErrorCode::kParse, "mel: expected n_frames >= 1 and n_mels == 80");
  }
  mel.data.resize(count);
  for (auto& v : mel.data) v = r.F32();
  return mel;
}

void WriteMel(const MelSpectrogram& mel, const fs::path& path) {
  WriteFileBytes(path, EncodeMel(mel));
}

MelSpectrogram ReadMel(const fs::path& path) {
  try {
    return DecodeMel(ReadFileBytes(path));
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dystts
