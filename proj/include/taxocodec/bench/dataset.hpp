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

#ifndef TAXOCODEC_BENCH_DATASET_HPP_
#define TAXOCODEC_BENCH_DATASET_HPP_

#include <string>

#include "json.hpp"
#include "taxocodec/bench/scene.hpp"

namespace txc::bench {

struct Dataset {
  std::vector<SceneSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  const SceneSample& operator[](int i) const { return samples[static_cast<size_t>(i)]; }
};

// Flat binary sample file. The JSON sidecar manifest carries the seed,
// counts, task list and content hash of each split.
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

// Generates the three disjoint-seed splits and writes train.bin / val.bin /
// test.bin plus manifest.json under `dir`.
struct BenchSplits {
  Dataset train, val, test;
};

BenchSplits generate_splits(uint64_t seed, int n_train, int n_val, int n_test);
void save_splits(const std::string& dir, const BenchSplits& splits, uint64_t seed, const nlohmann::json& extra_meta);
BenchSplits load_splits(const std::string& dir);

}  // namespace txc::bench

#endif  // TAXOCODEC_BENCH_DATASET_HPP_
