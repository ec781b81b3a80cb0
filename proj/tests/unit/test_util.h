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

#ifndef DYSTTS_TESTS_TEST_UTIL_H_
#define DYSTTS_TESTS_TEST_UTIL_H_

#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "dystts/acoustic_model.h"
#include "dystts/error.h"
#include "dystts/model_bundle.h"
#include "dystts/toy_corpus.h"
#include "dystts/trainer.h"

namespace dystts::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "dystts_XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline ModelConfig TinyConfig(int n_speakers = 2) {
  ModelConfig c;
  c.n_encoder_blocks = 1;
  c.n_decoder_blocks = 1;
  c.hidden = 16;
  c.ff_filter = 32;
  c.n_speakers = n_speakers;
  return c;
}

inline ToyCorpusSpec SmallToySpec(int speakers = 1, int utterances = 3, std::uint64_t seed = 7) {
  ToyCorpusSpec spec;
  spec.n_speakers_per_severity = speakers;
  spec.n_utterances_per_speaker = utterances;
  spec.base_seed = seed;
  return spec;
}

// A toy corpus on disk plus a briefly trained tiny model saved next to it.
struct TrainedToy {
  TempDir dir;
  std::filesystem::path manifest;
  std::filesystem::path checkpoint;
  std::vector<Utterance> corpus;

  explicit TrainedToy(int epochs = 2, int speakers = 1, int utterances = 3) {
    corpus = GenerateToyCorpus(SmallToySpec(speakers, utterances), FrameParams{}, dir / "toy");
    manifest = dir / "toy" / kManifestName;
    TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = 4;
    tc.seed = 3;
    TrainOptions options;
    options.out_dir = dir / "run";
    Train(TinyConfig(), tc, PrepareCorpus(manifest, FrameParams{}), options);
    checkpoint = dir / "run" / "best.ckpt";
  }
};

#define EXPECT_ERROR_CODE(stmt, expected_code)                             \
  do {                                                                     \
    try {                                                                  \
      stmt;                                                                \
      ADD_FAILURE() << "expected an error from " #stmt;                    \
    } catch (const ::dystts::Error& e) {                                   \
      EXPECT_EQ(e.code(), expected_code) << e.what();                      \
    }                                                                      \
  } while (0)

}  // namespace dystts::testing

#endif  // DYSTTS_TESTS_TEST_UTIL_H_
