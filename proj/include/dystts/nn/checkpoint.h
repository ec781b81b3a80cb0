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

#ifndef DYSTTS_NN_CHECKPOINT_H_
#define DYSTTS_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dystts/nn/layers.h"

namespace dystts::nn {

struct NamedTensor {
  std::string name;
  Tensor<float> tensor;
};

// "CKPT" | u16 version | u32 count | per entry: u16 name_len, UTF-8 name,
// u8 ndim, u32 dims[ndim], f32 payload. Little-endian throughout.
std::vector<std::uint8_t> EncodeCheckpoint(const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> DecodeCheckpoint(const std::vector<std::uint8_t>& bytes);
void SaveCheckpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& entries);
std::vector<NamedTensor> LoadCheckpoint(const std::filesystem::path& path);

template <typename T>
std::vector<NamedTensor> SnapshotParameters(const ParameterSet<T>& params);
// Copies values by name; every parameter must be present with its shape.
template <typename T>
void RestoreParameters(ParameterSet<T>& params, const std::vector<NamedTensor>& entries);

}  // namespace dystts::nn

#endif  // DYSTTS_NN_CHECKPOINT_H_
