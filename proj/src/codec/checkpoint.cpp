/* Copyright 2026 The taxocodec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "taxocodec/codec/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include "taxocodec/version.hpp"

namespace txc::codec {

namespace {

constexpr char kMagic[4] = {'T', 'X', 'C', 'K'};

void put_u32(std::ofstream& f, uint32_t v) {
  uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
  f.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::ifstream& f) {
  uint8_t b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  require(f.good(), "BAD_CHECKPOINT", "checkpoint truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

std::string get_string(std::ifstream& f) {
  const uint32_t len = get_u32(f);
  std::string s(len, '\0');
  f.read(s.data(), len);
  require(f.good(), "BAD_CHECKPOINT", "checkpoint truncated inside a string");
  return s;
}

struct FileTensor {
  nn::Shape shape;
  std::vector<float> data;
};

std::ifstream open_and_check(const std::string& path, nlohmann::json* meta_out) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "MODEL_NOT_FOUND", path);
  char magic[4];
  f.read(magic, 4);
  require(f.good() && std::memcmp(magic, kMagic, 4) == 0, "BAD_CHECKPOINT", path + " is not a checkpoint");
  const uint32_t version = get_u32(f);
  require(version == static_cast<uint32_t>(kCheckpointVersion), "UNSUPPORTED_VERSION",
          "checkpoint version " + std::to_string(version) + ", supported " + std::to_string(kCheckpointVersion));
  const std::string meta_str = get_string(f);
  *meta_out = nlohmann::json::parse(meta_str, nullptr, false);
  require(!meta_out->is_discarded(), "BAD_CHECKPOINT", "checkpoint metadata is not valid JSON");
  return f;
}

}  // namespace

void save_checkpoint(const std::string& path, const nlohmann::json& meta, const nn::ParamSet<float>& params) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "IO_ERROR", "cannot open " + path + " for writing");
  f.write(kMagic, 4);
  put_u32(f, static_cast<uint32_t>(kCheckpointVersion));
  nlohmann::json full = meta;
  full["tool_version"] = kToolVersion;
  const std::string meta_str = full.dump();
  put_u32(f, static_cast<uint32_t>(meta_str.size()));
  f.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  put_u32(f, static_cast<uint32_t>(params.size()));
  for (const auto& item : params.items()) {
    put_u32(f, static_cast<uint32_t>(item.name.size()));
    f.write(item.name.data(), static_cast<std::streamsize>(item.name.size()));
    const auto& t = *item.param->value;
    put_u32(f, static_cast<uint32_t>(t.shape.size()));
    for (int d : t.shape) put_u32(f, static_cast<uint32_t>(d));
    f.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
  require(f.good(), "IO_ERROR", "short write to " + path);
}

nlohmann::json peek_checkpoint_meta(const std::string& path) {
  nlohmann::json meta;
  open_and_check(path, &meta);
  return meta;
}

nlohmann::json load_checkpoint(const std::string& path, const nn::ParamSet<float>& params) {
  nlohmann::json meta;
  std::ifstream f = open_and_check(path, &meta);
  const uint32_t count = get_u32(f);
  std::map<std::string, FileTensor> tensors;
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = get_string(f);
    const uint32_t rank = get_u32(f);
    nn::Shape shape(rank);
    for (uint32_t d = 0; d < rank; ++d) shape[d] = static_cast<int>(get_u32(f));
    FileTensor t;
    t.shape = shape;
    t.data.resize(static_cast<size_t>(nn::numel(shape)));
    f.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    require(f.good(), "BAD_CHECKPOINT", "checkpoint truncated inside tensor " + name);
    tensors.emplace(name, std::move(t));
  }
  require(tensors.size() == params.size(), "BAD_CHECKPOINT",
          "checkpoint holds " + std::to_string(tensors.size()) + " tensors, model expects " +
              std::to_string(params.size()));
  for (const auto& item : params.items()) {
    auto it = tensors.find(item.name);
    require(it != tensors.end(), "BAD_CHECKPOINT", "checkpoint is missing tensor " + item.name);
    require(it->second.shape == item.param->value->shape, "SHAPE_MISMATCH",
            "checkpoint tensor " + item.name + " has shape " + nn::shape_str(it->second.shape) + ", model expects " +
                nn::shape_str(item.param->value->shape));
    item.param->value->data = it->second.data;
  }
  return meta;
}

}  // namespace txc::codec
