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

#include "taxocodec/bench/scene.hpp"

#include <cmath>

#include "taxocodec/hash.hpp"
#include "taxocodec/rng.hpp"

namespace txc::bench {

namespace {

constexpr int kSide = kImageSize;
constexpr double kPi = 3.14159265358979323846;

struct ShapeGeom {
  int type;  // 1 = disc, 2 = square, 3 = diamond
  double cx, cy, r;
};

// Background palettes per scene class: two anchor colors and a gradient mode.
struct ScenePalette {
  float c0[3];
  float c1[3];
  int mode;  // 0 horizontal, 1 vertical, 2 diagonal, 3 radial
};

constexpr ScenePalette kScenePalettes[kSceneClasses] = {
    {{0.15f, 0.25f, 0.55f}, {0.45f, 0.65f, 0.90f}, 0},
    {{0.50f, 0.20f, 0.15f}, {0.95f, 0.60f, 0.35f}, 1},
    {{0.12f, 0.45f, 0.20f}, {0.55f, 0.85f, 0.45f}, 2},
    {{0.35f, 0.30f, 0.40f}, {0.80f, 0.75f, 0.70f}, 3},
};

constexpr float kShapePalette[3][3] = {
    {0.92f, 0.85f, 0.25f},  // disc
    {0.90f, 0.30f, 0.70f},  // square
    {0.25f, 0.85f, 0.85f},  // diamond
};

bool inside_shape(const ShapeGeom& g, double x, double y) {
  const double dx = x - g.cx, dy = y - g.cy;
  switch (g.type) {
    case 1:
      return dx * dx + dy * dy <= g.r * g.r;
    case 2:
      return std::max(std::abs(dx), std::abs(dy)) <= g.r * 0.85;
    default:
      return std::abs(dx) + std::abs(dy) <= g.r * 1.2;
  }
}

double unit_hash(uint64_t seed, uint64_t key) {
  return static_cast<double>(mix_u64(seed, key) >> 11) * 0x1.0p-53;
}

float background_mix(int mode, int x, int y) {
  const double fx = x / static_cast<double>(kSide - 1);
  const double fy = y / static_cast<double>(kSide - 1);
  switch (mode) {
    case 0:
      return static_cast<float>(fx);
    case 1:
      return static_cast<float>(fy);
    case 2:
      return static_cast<float>(0.5 * (fx + fy));
    default: {
      const double dx = fx - 0.5, dy = fy - 0.5;
      return static_cast<float>(std::min(1.0, 2.0 * std::sqrt(dx * dx + dy * dy)));
    }
  }
}

}  // namespace

std::vector<uint8_t> boundary_map(const std::vector<uint8_t>& seg, int h, int w) {
  require(static_cast<int>(seg.size()) == h * w, "SHAPE_MISMATCH", "boundary_map: mask size mismatch");
  std::vector<uint8_t> edges(seg.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const uint8_t v = seg[static_cast<size_t>(y) * w + x];
      const bool diff = (x > 0 && seg[static_cast<size_t>(y) * w + x - 1] != v) ||
                        (x + 1 < w && seg[static_cast<size_t>(y) * w + x + 1] != v) ||
                        (y > 0 && seg[static_cast<size_t>(y - 1) * w + x] != v) ||
                        (y + 1 < h && seg[static_cast<size_t>(y + 1) * w + x] != v);
      edges[static_cast<size_t>(y) * w + x] = diff ? 1 : 0;
    }
  }
  return edges;
}

std::vector<float> render_image(const SceneSample& sample) {
  const auto& pal = kScenePalettes[sample.scene_class];
  std::vector<float> image(static_cast<size_t>(3) * kSide * kSide);
  for (int y = 0; y < kSide; ++y) {
    for (int x = 0; x < kSide; ++x) {
      const size_t p = static_cast<size_t>(y) * kSide + x;
      float base[3];
      const uint8_t type = sample.seg[p];
      if (type == 0) {
        const float t = background_mix(pal.mode, x, y);
        for (int c = 0; c < 3; ++c) base[c] = pal.c0[c] + (pal.c1[c] - pal.c0[c]) * t;
      } else {
        for (int c = 0; c < 3; ++c) base[c] = kShapePalette[type - 1][c];
      }
      const float light = 0.35f + 0.65f * sample.shading[p];
      for (int c = 0; c < 3; ++c) {
        const uint64_t key = static_cast<uint64_t>(c) * kSide * kSide + p;
        const float noise = static_cast<float>(0.02 * (unit_hash(sample.render_seed, key) - 0.5));
        float v = base[c] * light + noise;
        image[static_cast<size_t>(c) * kSide * kSide + p] = std::min(1.0f, std::max(0.0f, v));
      }
    }
  }
  return image;
}

std::vector<SceneSample> generate(uint64_t seed, int count) {
  require(count >= 1, "BAD_ARGUMENT", "generate: count must be >= 1");
  std::vector<SceneSample> samples;
  samples.reserve(static_cast<size_t>(count));
  for (int idx = 0; idx < count; ++idx) {
    Rng rng(mix_u64(seed, static_cast<uint64_t>(idx) + 1));
    SceneSample s;
    s.render_seed = rng.next_u64();
    s.scene_class = rng.next_int(0, kSceneClasses - 1);
    const int shapes = rng.next_int(1, kCountClasses);
    s.count_class = shapes - 1;
    const double light_angle = rng.next_uniform(0.0, 2.0 * kPi);

    // One shape per occupied cell of a 2x2 grid; radii and jitter are bounded
    // so shapes never overlap.
    int cells[4] = {0, 1, 2, 3};
    for (int i = 3; i > 0; --i) std::swap(cells[i], cells[rng.next_int(0, i)]);
    std::vector<ShapeGeom> geoms;
    for (int i = 0; i < shapes; ++i) {
      const int cell = cells[i];
      const double cx = (cell % 2 == 0 ? 16.0 : 48.0) + rng.next_uniform(-3.0, 3.0);
      const double cy = (cell / 2 == 0 ? 16.0 : 48.0) + rng.next_uniform(-3.0, 3.0);
      const double r = rng.next_uniform(5.0, 8.0);
      const int type = rng.next_int(1, 3);
      geoms.push_back({type, cx, cy, r});
    }

    s.seg.assign(static_cast<size_t>(kSide) * kSide, 0);
    s.shading.assign(static_cast<size_t>(kSide) * kSide, 0.0f);
    s.orient.assign(static_cast<size_t>(2) * kSide * kSide, 0.0f);

    const double lz = 0.9;
    const double lnorm = std::sqrt(1.0 + lz * lz);
    const double lx = std::cos(light_angle) / lnorm, ly = std::sin(light_angle) / lnorm;
    for (int y = 0; y < kSide; ++y) {
      for (int x = 0; x < kSide; ++x) {
        const size_t p = static_cast<size_t>(y) * kSide + x;
        int hit = -1;
        for (size_t gi = 0; gi < geoms.size(); ++gi) {
          if (inside_shape(geoms[gi], x, y)) {
            hit = static_cast<int>(gi);
            break;
          }
        }
        double nx, ny, nz;
        if (hit >= 0) {
          s.seg[p] = static_cast<uint8_t>(geoms[static_cast<size_t>(hit)].type);
          const auto& g = geoms[static_cast<size_t>(hit)];
          nx = (x - g.cx) / g.r;
          ny = (y - g.cy) / g.r;
          nz = std::sqrt(std::max(0.1, 1.0 - nx * nx - ny * ny));
        } else {
          nx = 0.3 * std::sin(2.0 * kPi * x / kSide + light_angle);
          ny = 0.3 * std::sin(2.0 * kPi * y / kSide - light_angle);
          nz = 1.0;
        }
        const double nn = std::sqrt(nx * nx + ny * ny + nz * nz);
        const double shade = (nx * lx + ny * ly + nz * (lz / lnorm)) / nn;
        s.shading[p] = static_cast<float>(std::min(1.0, std::max(0.0, shade)));

        double best_d2 = 1e18;
        double theta = 0.0;
        for (const auto& g : geoms) {
          const double dx = g.cx - x, dy = g.cy - y;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best_d2) {
            best_d2 = d2;
            theta = std::atan2(dy, dx);
          }
        }
        s.orient[p] = static_cast<float>(std::cos(theta));
        s.orient[static_cast<size_t>(kSide) * kSide + p] = static_cast<float>(std::sin(theta));
      }
    }
    s.edges = boundary_map(s.seg, kSide, kSide);
    s.image = render_image(s);
    samples.push_back(std::move(s));
  }
  return samples;
}

uint64_t content_hash(const std::vector<SceneSample>& samples) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : samples) {
    h = fnv1a64_values(s.image, h);
    h = fnv1a64(&s.scene_class, sizeof s.scene_class, h);
    h = fnv1a64(&s.count_class, sizeof s.count_class, h);
    h = fnv1a64_values(s.seg, h);
    h = fnv1a64_values(s.orient, h);
    h = fnv1a64_values(s.shading, h);
    h = fnv1a64_values(s.edges, h);
    h = fnv1a64(&s.render_seed, sizeof s.render_seed, h);
  }
  return h;
}

}  // namespace txc::bench
