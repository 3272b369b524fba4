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

#ifndef TAXOCODEC_BENCH_SCENE_HPP_
#define TAXOCODEC_BENCH_SCENE_HPP_

#include <cstdint>
#include <vector>

#include "taxocodec/bench/tasks.hpp"

namespace txc::bench {

// One procedurally generated scene. Labels are drawn first and the image is
// rendered from them, so generation realizes P(X|Y): the stored labels plus
// the render seed fully determine the image.
struct SceneSample {
  std::vector<float> image;    // 3 x 64 x 64, values in [0,1]
  int scene_class = 0;         // background palette/gradient family
  int count_class = 0;         // number of shapes minus one
  std::vector<uint8_t> seg;    // 64 x 64 shape-type mask, 0 = background
  std::vector<float> orient;   // 2 x 64 x 64 unit vector toward the nearest shape center
  std::vector<float> shading;  // 64 x 64 in [0,1]
  std::vector<uint8_t> edges;  // 64 x 64 mask boundary
  uint64_t render_seed = 0;
};

// Deterministic in `seed`; sample i derives its own substream.
std::vector<SceneSample> generate(uint64_t seed, int count);

// Rebuilds the image from (seg, scene_class, shading, render_seed). generate
// uses this same function, so re-rendering a stored sample is an identity.
std::vector<float> render_image(const SceneSample& sample);

// edge(p) = 1 iff some 4-neighbor of p carries a different mask value.
std::vector<uint8_t> boundary_map(const std::vector<uint8_t>& seg, int h, int w);

// Content hash over all fields of all samples, for manifests and determinism
// checks.
uint64_t content_hash(const std::vector<SceneSample>& samples);

}  // namespace txc::bench

#endif  // TAXOCODEC_BENCH_SCENE_HPP_
