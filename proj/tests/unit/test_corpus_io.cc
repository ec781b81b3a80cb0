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

#include <cstring>
#include <fstream>

#include <gtest/gtest.h>

#include "dystts/rng.h"
#include "test_util.h"

namespace dystts {
namespace {

using testing::TempDir;

void WriteLines(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

TEST(ManifestTest, ParsesDocumentedRecord) {
  TempDir dir;
  WriteLines(dir / "m.jsonl",
             R"({"id":"u1","speaker":"M05","severity":2,"text":"bad and good",)"
             R"("phones":["B","AE","D","AE","N","D","G","UH","D"],)"
             R"("word_index":[0,0,0,1,1,1,2,2,2],"alignment":null,"mel":"mel/u1.mel","audio":null})"
             "\n");
  const auto utts = LoadManifest(dir / "m.jsonl");
  ASSERT_EQ(utts.size(), 1u);
  EXPECT_EQ(utts[0].id, "u1");
  EXPECT_EQ(utts[0].speaker_id, "M05");
  EXPECT_EQ(utts[0].severity, 2);
  EXPECT_EQ(utts[0].phones.WordCount(), 3);
  EXPECT_FALSE(utts[0].alignment_path.has_value());
  EXPECT_EQ(utts[0].mel_path, "mel/u1.mel");
  EXPECT_FALSE(utts[0].synthetic);
}

TEST(ManifestTest, EmptyFileGivesEmptyList) {
  TempDir dir;
  WriteLines(dir / "m.jsonl", "");
  EXPECT_TRUE(LoadManifest(dir / "m.jsonl").empty());
}

TEST(ManifestTest, RejectsDuplicateIds) {
  TempDir dir;
  const std::string line =
      R"({"id":"u1","speaker":"F01","severity":0,"text":"","phones":[],"word_index":[]})";
  WriteLines(dir / "m.jsonl", line + "\n" + line + "\n");
  try {
    LoadManifest(dir / "m.jsonl");
    FAIL() << "duplicate accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(ManifestTest, ReportsLineOfMalformedJson) {
  TempDir dir;
  WriteLines(dir / "m.jsonl",
             R"({"id":"a","speaker":"F01","severity":0,"text":""})"
             "\n{not json\n");
  try {
    LoadManifest(dir / "m.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("m.jsonl:2"), std::string::npos) << e.what();
  }
}

TEST(ManifestTest, RejectsSeverityOutOfRange) {
  TempDir dir;
  WriteLines(dir / "m.jsonl", R"({"id":"a","speaker":"F01","severity":3,"text":""})"
                              "\n");
  EXPECT_THROW(LoadManifest(dir / "m.jsonl"), Error);
}

TEST(ManifestTest, RejectsTextWithoutPhones) {
  TempDir dir;
  WriteLines(dir / "m.jsonl", R"({"id":"a","speaker":"F01","severity":0,"text":"hello"})"
                              "\n");
  EXPECT_THROW(LoadManifest(dir / "m.jsonl"), Error);
}

TEST(ManifestTest, RoundTripsFieldByField) {
  TempDir dir;
  std::vector<Utterance> utts(2);
  utts[0].id = "x";
  utts[0].speaker_id = "L01";
  utts[0].severity = 1;
  utts[0].text = "bad good";
  utts[0].phones = {{"B", "AE", "D", "PAUSE", "G", "UH", "D"}, {0, 0, 0, 0, 1, 1, 1}};
  utts[0].alignment_path = "align/x.jsonl";
  utts[1].id = "y";
  utts[1].speaker_id = "M01";
  utts[1].severity = 2;
  utts[1].synthetic = true;
  utts[1].source_id = "x";
  utts[1].controls = Json{{"pitch_coef", 0.5}};
  SaveManifest(utts, dir / "m.jsonl");
  const auto back = LoadManifest(dir / "m.jsonl");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(UtteranceToJson(back[i]), UtteranceToJson(utts[i]));
  }
  SaveManifest(back, dir / "m2.jsonl");
  EXPECT_EQ(ReadTextFile(dir / "m.jsonl"), ReadTextFile(dir / "m2.jsonl"));
}

TEST(AlignmentTest, ParsesEntryDuration) {
  TempDir dir;
  WriteLines(dir / "a.jsonl", R"({"phone":"AE","start":0.10,"end":0.25,"word":0})"
                              "\n");
  const Alignment a = LoadAlignment(dir / "a.jsonl");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_NEAR(a[0].Duration(), 0.15, 1e-12);
}

TEST(AlignmentTest, PreservesOrderAndSilence) {
  TempDir dir;
  WriteLines(dir / "a.jsonl",
             R"({"phone":"B","start":0.0,"end":0.1,"word":0})"
             "\n"
             R"({"phone":"sp","start":0.1,"end":0.3,"word":0})"
             "\n"
             R"({"phone":"G","start":0.3,"end":0.4,"word":1})"
             "\n");
  const Alignment a = LoadAlignment(dir / "a.jsonl");
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].phone, "B");
  EXPECT_TRUE(a[1].IsSilence());
  EXPECT_EQ(a[2].word, 1);
}

TEST(AlignmentTest, RejectsOverlap) {
  Alignment a = {{"B", 0.0, 0.2, 0}, {"AE", 0.15, 0.3, 0}};
  EXPECT_THROW(ValidateAlignment(a), Error);
}

TEST(AlignmentTest, RejectsNegativeTime) {
  Alignment a = {{"B", -0.1, 0.2, 0}};
  EXPECT_THROW(ValidateAlignment(a), Error);
}

TEST(AlignmentTest, RejectsDecreasingWordIndex) {
  Alignment a = {{"B", 0.0, 0.1, 1}, {"AE", 0.1, 0.2, 0}};
  EXPECT_THROW(ValidateAlignment(a), Error);
}

TEST(AlignmentTest, RoundTrips) {
  TempDir dir;
  Alignment a = {{"B", 0.0, 0.125, 0}, {"sp", 0.125, 0.4, 0}, {"AE", 0.4, 0.5, 1}};
  SaveAlignment(a, dir / "a.jsonl");
  const Alignment b = LoadAlignment(dir / "a.jsonl");
  ASSERT_EQ(b.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(b[i].phone, a[i].phone);
    EXPECT_EQ(b[i].start, a[i].start);
    EXPECT_EQ(b[i].end, a[i].end);
    EXPECT_EQ(b[i].word, a[i].word);
  }
}

// Independent little-endian serialization of the documented layout.
std::vector<std::uint8_t> ExpectedMelBytes(const MelSpectrogram& mel) {
  std::vector<std::uint8_t> out = {'M', 'E', 'L', 'F', 1, 0};
  auto put32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put32(static_cast<std::uint32_t>(mel.n_frames));
  put32(static_cast<std::uint32_t>(mel.n_mels));
  for (float f : mel.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put32(bits);
  }
  return out;
}

TEST(MelFileTest, ZeroFrameOfEightyIs334Bytes) {
  TempDir dir;
  MelSpectrogram mel(1, 80);
  WriteMel(mel, dir / "z.mel");
  EXPECT_EQ(std::filesystem::file_size(dir / "z.mel"), 4u + 2 + 4 + 4 + 320);
  const MelSpectrogram back = ReadMel(dir / "z.mel");
  EXPECT_EQ(back.n_frames, 1u);
  EXPECT_EQ(back.data, mel.data);
}

TEST(MelFileTest, RandomMatrixRoundTripsBitwise) {
  TempDir dir;
  Rng rng(11);
  MelSpectrogram mel(37, 80);
  for (float& v : mel.data) v = static_cast<float>(rng.Normal() * 3.0);
  const auto bytes = EncodeMel(mel);
  EXPECT_EQ(bytes, ExpectedMelBytes(mel));
  WriteMel(mel, dir / "r.mel");
  EXPECT_EQ(ReadFileBytes(dir / "r.mel"), bytes);
  const MelSpectrogram back = ReadMel(dir / "r.mel");
  ASSERT_EQ(back.data.size(), mel.data.size());
  EXPECT_EQ(std::memcmp(back.data.data(), mel.data.data(), mel.data.size() * 4), 0);
  EXPECT_EQ(EncodeMel(back), bytes);
}

TEST(MelFileTest, RejectsBadMagic) {
  auto bytes = EncodeMel(MelSpectrogram(2, 80));
  std::memcpy(bytes.data(), "XXXX", 4);
  EXPECT_ERROR_CODE(DecodeMel(bytes), ErrorCode::kParse);
}

TEST(MelFileTest, RejectsPayloadLengthMismatch) {
  auto bytes = EncodeMel(MelSpectrogram(2, 80));
  bytes.resize(bytes.size() - 4);
  EXPECT_ERROR_CODE(DecodeMel(bytes), ErrorCode::kParse);
}

TEST(MelFileTest, RejectsNonFiniteOnWrite) {
  TempDir dir;
  MelSpectrogram mel(1, 80);
  mel.data[5] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_ERROR_CODE(WriteMel(mel, dir / "n.mel"), ErrorCode::kNumeric);
}

TEST(CorpusPathTest, ResolvesRelativeToManifest) {
  EXPECT_EQ(ResolveCorpusPath("/data/toy/manifest.jsonl", "mel/a.mel"),
            std::filesystem::path("/data/toy/mel/a.mel"));
  EXPECT_EQ(ResolveCorpusPath("/data/toy/manifest.jsonl", "/abs/a.mel"),
            std::filesystem::path("/abs/a.mel"));
}

}  // namespace
}  // namespace dystts
