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

#include "dystts/nn/checkpoint.h"

#include <unordered_map>
#include <unordered_set>

#include "dystts/byte_io.h"
#include "dystts/corpus_io.h"

namespace dystts::nn {
namespace {
constexpr char kMagic[] = "CKPT";
constexpr std::uint16_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> EncodeCheckpoint(const std::vector<NamedTensor>& entries) {
  ByteWriter w;
  w.Raw(kMagic);
  w.U16(kVersion);
  w.U32(static_cast<std::uint32_t>(entries.size()));
  std::unordered_set<std::string> names;
  for (const auto& e : entries) {
    Require(names.insert(e.name).second, "checkpoint: duplicate name '" + e.name + "'");
    Require(e.name.size() <= 0xffff, "checkpoint: name too long");
    Require(e.tensor.rank() <= 0xff, "checkpoint: too many dimensions");
    w.U16(static_cast<std::uint16_t>(e.name.size()));
    w.Raw(e.name);
    w.U8(static_cast<std::uint8_t>(e.tensor.rank()));
    for (std::size_t d : e.tensor.shape()) w.U32(static_cast<std::uint32_t>(d));
    for (float v : e.tensor.values()) w.F32(v);
  }
  return std::move(w.bytes());
}

std::vector<NamedTensor> DecodeCheckpoint(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "checkpoint");
  if (r.remaining() < 4 || r.Raw(4) != kMagic) Fail(ErrorCode::kParse, "checkpoint: bad magic");
  const std::uint16_t version = r.U16();
  if (version != kVersion) {
    Fail(ErrorCode::kParse, "checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.U32();
  std::vector<NamedTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor e;
    e.name = r.Raw(r.U16());
    Shape shape(r.U8());
    for (auto& d : shape) d = r.U32();
    const std::size_t n = Tensor<float>::NumElements(shape);
    if (r.remaining() < n * 4) Fail(ErrorCode::kParse, "checkpoint: truncated payload");
    std::vector<float> data(n);
    for (auto& v : data) v = r.F32();
    e.tensor = Tensor<float>(std::move(shape), std::move(data));
    out.push_back(std::move(e));
  }
  if (r.remaining() != 0) Fail(ErrorCode::kParse, "checkpoint: trailing bytes");
  return out;
}

void SaveCheckpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& entries) {
  WriteFileBytes(path, EncodeCheckpoint(entries));
}

std::vector<NamedTensor> LoadCheckpoint(const std::filesystem::path& path) {
  try {
    return DecodeCheckpoint(ReadFileBytes(path));
  } catch (const Error& e) {
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

template <typename T>
std::vector<NamedTensor> SnapshotParameters(const ParameterSet<T>& params) {
  std::vector<NamedTensor> out;
  out.reserve(params.params().size());
  for (const auto& p : params.params()) {
    out.push_back({p.name, p.var.value().template Cast<float>()});
  }
  return out;
}

template <typename T>
void RestoreParameters(ParameterSet<T>& params, const std::vector<NamedTensor>& entries) {
  std::unordered_map<std::string, const NamedTensor*> by_name;
  for (const auto& e : entries) by_name[e.name] = &e;
  Require(by_name.size() == params.params().size(),
          "checkpoint: holds " + std::to_string(by_name.size()) + " tensors, model expects " +
              std::to_string(params.params().size()));
  for (auto& p : params.params()) {
    auto it = by_name.find(p.name);
    Require(it != by_name.end(), "checkpoint: missing parameter '" + p.name + "'");
    const auto& src = it->second->tensor;
    Require(src.shape() == p.var.value().shape(),
            "checkpoint: shape mismatch for '" + p.name + "': " + ShapeString(src.shape()) +
                " vs " + ShapeString(p.var.value().shape()));
    p.var.mutable_value() = src.template Cast<T>();
  }
}

template std::vector<NamedTensor> SnapshotParameters(const ParameterSet<float>&);
template std::vector<NamedTensor> SnapshotParameters(const ParameterSet<double>&);
template void RestoreParameters(ParameterSet<float>&, const std::vector<NamedTensor>&);
template void RestoreParameters(ParameterSet<double>&, const std::vector<NamedTensor>&);

}  // namespace dystts::nn
