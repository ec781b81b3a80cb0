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

#include <fstream>
#include <iterator>
#include <map>
#include <numeric>

#include <gtest/gtest.h>

#include "dystts/audio.h"
#include "dystts/pause_model.h"
#include "dystts/prosody_features.h"
#include "test_util.h"

namespace dystts {
namespace {

namespace fs = std::filesystem;
using testing::SmallToySpec;
using testing::TempDir;

std::map<std::string, std::string> TreeBytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] =
        std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

TEST(ToyCorpusTest, SpeakersCoverEverySeverity) {
  const auto speakers = ToySpeakers(SmallToySpec(2, 1));
  ASSERT_EQ(speakers.size(), 6u);
  std::vector<std::string> ids;
  for (const auto& s : speakers) ids.push_back(s.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"N01", "N02", "L01", "L02", "M01", "M02"}));
  EXPECT_EQ(speakers[0].severity, 0);
  EXPECT_EQ(speakers[2].severity, 1);
  EXPECT_EQ(speakers[5].severity, 2);
}

TEST(ToyCorpusTest, GeneratesAConsistentCorpus) {
  TempDir dir;
  const auto utts = GenerateToyCorpus(SmallToySpec(1, 2), FrameParams{}, dir / "toy");
  ASSERT_EQ(utts.size(), 6u);
  const auto loaded = LoadManifest(dir / "toy" / kManifestName);
  ASSERT_EQ(loaded.size(), 6u);
  for (const Utterance& u : loaded) {
    const fs::path m = dir / "toy" / kManifestName;
    const Alignment a = LoadAlignment(ResolveCorpusPath(m, *u.alignment_path));
    const MelSpectrogram mel = ReadMel(ResolveCorpusPath(m, *u.mel_path));
    const Waveform wav = ReadWav(ResolveCorpusPath(m, *u.audio_path));
    ASSERT_EQ(a.size(), u.phones.size());
    const auto d = PhonemeDurations(a, FrameParams{}, mel.n_frames);
    EXPECT_EQ(static_cast<std::size_t>(std::accumulate(d.begin(), d.end(), 0)), mel.n_frames);
    EXPECT_EQ(mel.n_frames, FrameParams{}.NumFrames(wav.samples.size()));
    for (float s : wav.samples) ASSERT_LE(std::abs(s), 1.0f);
  }
}

TEST(ToyCorpusTest, RegenerationIsByteIdentical) {
  TempDir a, b;
  GenerateToyCorpus(SmallToySpec(1, 2, 42), FrameParams{}, a.path());
  GenerateToyCorpus(SmallToySpec(1, 2, 42), FrameParams{}, b.path());
  const auto ta = TreeBytes(a.path());
  EXPECT_EQ(ta.size(), 1u + 3u * 6u);
  EXPECT_EQ(ta, TreeBytes(b.path()));
}

TEST(ToyCorpusTest, SeverityGroupsReadTheSamePrompts) {
  const ToyCorpusSpec spec = SmallToySpec(1, 5);
  const auto speakers = ToySpeakers(spec);
  for (int k = 0; k < 5; ++k) {
    const auto n = BuildToyUtterance(spec, FrameParams{}, speakers[0], 0, k, false);
    const auto m = BuildToyUtterance(spec, FrameParams{}, speakers[2], 0, k, false);
    EXPECT_EQ(n.utterance.text, m.utterance.text);
  }
}

TEST(ToyCorpusTest, SevereSpeechIsSlowerByTheConfiguredFactor) {
  ToyCorpusSpec spec = SmallToySpec(1, 250);
  spec.severity_pause_rates = {0.0, 0.0, 0.0};
  const auto speakers = ToySpeakers(spec);
  double frames0 = 0.0, frames2 = 0.0;
  for (int k = 0; k < spec.n_utterances_per_speaker; ++k) {
    const auto n = BuildToyUtterance(spec, FrameParams{}, speakers[0], 0, k, false);
    const auto m = BuildToyUtterance(spec, FrameParams{}, speakers[2], 0, k, false);
    EXPECT_EQ(n.utterance.phones.PauseCount(), 0u);
    frames0 += std::accumulate(n.durations.begin(), n.durations.end(), 0);
    frames2 += std::accumulate(m.durations.begin(), m.durations.end(), 0);
  }
  EXPECT_NEAR(frames2 / frames0, 1.8, 1.8 * 0.05);
}

TEST(ToyCorpusTest, PauseRatesFollowSeverity) {
  const ToyCorpusSpec spec = SmallToySpec(2, 60);
  std::vector<AlignedUtterance> aligned;
  for (const ToySpeaker& speaker : ToySpeakers(spec)) {
    const int slot = std::stoi(speaker.id.substr(1)) - 1;
    for (int k = 0; k < spec.n_utterances_per_speaker; ++k) {
      const auto t = BuildToyUtterance(spec, FrameParams{}, speaker, slot, k, false);
      aligned.push_back({speaker.severity, t.alignment});
      const std::vector<int> d = PhonemeDurations(t.alignment, FrameParams{},
          static_cast<std::size_t>(std::accumulate(t.durations.begin(), t.durations.end(), 0)));
      EXPECT_EQ(d, t.durations);
    }
  }
  const SeverityPauseStats stats = EstimatePauseStats(aligned);
  EXPECT_LT(stats.SlotProbability(0), stats.SlotProbability(1));
  EXPECT_LT(stats.SlotProbability(1), stats.SlotProbability(2));
  EXPECT_NEAR(stats.SlotProbability(0), 0.06, 0.04);
  EXPECT_NEAR(stats.SlotProbability(2), 0.6, 0.06);
}

TEST(ToyCorpusTest, SpecValidationAndJson) {
  ToyCorpusSpec spec = SmallToySpec(3, 4, 9);
  const ToyCorpusSpec back = ToyCorpusSpec::FromJson(spec.ToJson());
  EXPECT_EQ(back.ToJson(), spec.ToJson());
  spec.min_words = 0;
  EXPECT_ERROR_CODE(spec.Validate(), ErrorCode::kInvalidArgument);
  spec = SmallToySpec();
  spec.severity_pause_rates[1] = 1.5;
  EXPECT_ERROR_CODE(spec.Validate(), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace dystts
