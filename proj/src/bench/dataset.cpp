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

#include "taxocodec/bench/dataset.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "taxocodec/hash.hpp"
#include "taxocodec/rng.hpp"
#include "taxocodec/version.hpp"

namespace txc::bench {

namespace {

constexpr char kMagic[4] = {'T', 'X', 'C', 'D'};
constexpr size_t kPixels = static_cast<size_t>(kImageSize) * kImageSize;

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void write_vec(std::ofstream& f, const std::vector<T>& v) {
  f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_pod(std::ifstream& f, T& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof v);
}

template <typename T>
void read_vec(std::ifstream& f, std::vector<T>& v, size_t n) {
  v.resize(n);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

}  // namespace

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "IO_ERROR", "cannot open " + path + " for writing");
  f.write(kMagic, 4);
  write_pod(f, static_cast<uint8_t>(kDatasetVersion));
  write_pod(f, static_cast<uint32_t>(ds.size()));
  for (const auto& s : ds.samples) {
    write_vec(f, s.image);
    write_pod(f, static_cast<uint8_t>(s.scene_class));
    write_pod(f, static_cast<uint8_t>(s.count_class));
    write_vec(f, s.seg);
    write_vec(f, s.orient);
    write_vec(f, s.shading);
    write_vec(f, s.edges);
    write_pod(f, s.render_seed);
  }
  require(f.good(), "IO_ERROR", "short write to " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "DATA_NOT_FOUND", path);
  char magic[4];
  f.read(magic, 4);
  require(f.good() && std::memcmp(magic, kMagic, 4) == 0, "BAD_DATASET", path + " is not a sample file");
  uint8_t version = 0;
  read_pod(f, version);
  require(version == kDatasetVersion, "UNSUPPORTED_VERSION", "dataset version " + std::to_string(version));
  uint32_t count = 0;
  read_pod(f, count);
  Dataset ds;
  ds.samples.resize(count);
  for (auto& s : ds.samples) {
    read_vec(f, s.image, 3 * kPixels);
    uint8_t sc = 0, cc = 0;
    read_pod(f, sc);
    read_pod(f, cc);
    s.scene_class = sc;
    s.count_class = cc;
    read_vec(f, s.seg, kPixels);
    read_vec(f, s.orient, 2 * kPixels);
    read_vec(f, s.shading, kPixels);
    read_vec(f, s.edges, kPixels);
    read_pod(f, s.render_seed);
    require(f.good(), "BAD_DATASET", path + " truncated");
  }
  return ds;
}

BenchSplits generate_splits(uint64_t seed, int n_train, int n_val, int n_test) {
  BenchSplits splits;
  splits.train.samples = generate(substream(seed, "split.train"), n_train);
  splits.val.samples = generate(substream(seed, "split.val"), n_val);
  splits.test.samples = generate(substream(seed, "split.test"), n_test);
  return splits;
}

void save_splits(const std::string& dir, const BenchSplits& splits, uint64_t seed, const nlohmann::json& extra_meta) {
  std::filesystem::create_directories(dir);
  save_dataset(dir + "/train.bin", splits.train);
  save_dataset(dir + "/val.bin", splits.val);
  save_dataset(dir + "/test.bin", splits.test);
  nlohmann::json manifest = extra_meta;
  manifest["seed"] = seed;
  manifest["tool_version"] = kToolVersion;
  manifest["counts"] = {{"train", splits.train.size()}, {"val", splits.val.size()}, {"test", splits.test.size()}};
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& spec : kTaskSpecs) tasks.push_back(spec.name);
  manifest["tasks"] = tasks;
  manifest["content_hash"] = {{"train", hash_hex(content_hash(splits.train.samples))},
                              {"val", hash_hex(content_hash(splits.val.samples))},
                              {"test", hash_hex(content_hash(splits.test.samples))}};
  std::ofstream f(dir + "/manifest.json", std::ios::trunc);
  require(f.good(), "IO_ERROR", "cannot write " + dir + "/manifest.json");
  f << manifest.dump(2) << "\n";
}

BenchSplits load_splits(const std::string& dir) {
  BenchSplits splits;
  splits.train = load_dataset(dir + "/train.bin");
  splits.val = load_dataset(dir + "/val.bin");
  splits.test = load_dataset(dir + "/test.bin");
  return splits;
}

}  // namespace txc::bench
