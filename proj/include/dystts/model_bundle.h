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

#ifndef DYSTTS_MODEL_BUNDLE_H_
#define DYSTTS_MODEL_BUNDLE_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "dystts/acoustic_model.h"

namespace dystts {

// A trained model as stored on disk: the checkpoint file plus a JSON sidecar
// (<checkpoint>.json) with hyperparameters, speaker names and feature
// normalization.
struct ModelBundle {
  std::vector<std::string> speakers;  // position = speaker id
  std::unique_ptr<AcousticModel<float>> model;

  const ModelConfig& config() const { return model->config(); }
  // Throws kInvalidArgument for names not seen in training.
  int SpeakerIndex(const std::string& name) const;
};

std::filesystem::path SidecarPath(const std::filesystem::path& checkpoint);

Json BundleMetadata(const AcousticModel<float>& model, const std::vector<std::string>& speakers);

void SaveModelBundle(const AcousticModel<float>& model, const std::vector<std::string>& speakers,
                     const std::filesystem::path& checkpoint);
ModelBundle LoadModelBundle(const std::filesystem::path& checkpoint);

}  // namespace dystts

#endif  // DYSTTS_MODEL_BUNDLE_H_
