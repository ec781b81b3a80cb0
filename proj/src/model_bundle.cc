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

#include "dystts/model_bundle.h"

#include "dystts/error.h"
#include "dystts/nn/checkpoint.h"

namespace dystts {

namespace {
constexpr const char* kFormat = "dystts-model";
constexpr int kVersion = 1;
}  // namespace

int ModelBundle::SpeakerIndex(const std::string& name) const {
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (speakers[i] == name) return static_cast<int>(i);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown speaker '" + name + "'");
}

std::filesystem::path SidecarPath(const std::filesystem::path& checkpoint) {
  std::filesystem::path p = checkpoint;
  p += ".json";
  return p;
}

Json BundleMetadata(const AcousticModel<float>& model, const std::vector<std::string>& speakers) {
  Json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config"] = model.config().ToJson();
  j["speakers"] = speakers;
  j["norm"] = model.norm_stats().ToJson();
  return j;
}

void SaveModelBundle(const AcousticModel<float>& model, const std::vector<std::string>& speakers,
                     const std::filesystem::path& checkpoint) {
  Require(speakers.size() == static_cast<std::size_t>(model.config().n_speakers),
          "model bundle: speaker list does not match n_speakers");
  nn::SaveCheckpoint(checkpoint, nn::SnapshotParameters(model.parameters()));
  WriteTextFile(SidecarPath(checkpoint), BundleMetadata(model, speakers).dump(2) + "\n");
}

ModelBundle LoadModelBundle(const std::filesystem::path& checkpoint) {
  const auto sidecar = SidecarPath(checkpoint);
  Json meta;
  try {
    meta = Json::parse(ReadTextFile(sidecar));
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kParse, sidecar.string() + ": " + e.what());
  }
  if (!meta.is_object() || meta.value("format", "") != kFormat) {
    Fail(ErrorCode::kParse, sidecar.string() + ": not a model metadata file");
  }
  if (meta.value("version", 0) != kVersion) {
    Fail(ErrorCode::kParse, sidecar.string() + ": unsupported version");
  }
  ModelBundle bundle;
  try {
    bundle.speakers = meta.at("speakers").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, sidecar.string() + ": bad speakers list: " + e.what());
  }
  const ModelConfig config = ModelConfig::FromJson(meta.at("config"));
  Require(bundle.speakers.size() == static_cast<std::size_t>(config.n_speakers),
          sidecar.string() + ": speaker list does not match n_speakers");
  bundle.model = std::make_unique<AcousticModel<float>>(config, 0);
  bundle.model->set_norm_stats(NormStats::FromJson(meta.at("norm")));
  nn::RestoreParameters(bundle.model->parameters(), nn::LoadCheckpoint(checkpoint));
  return bundle;
}

}  // namespace dystts
