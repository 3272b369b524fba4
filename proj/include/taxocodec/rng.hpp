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

#ifndef TAXOCODEC_RNG_HPP_
#define TAXOCODEC_RNG_HPP_

#include <cstdint>
#include <string_view>

namespace txc {

// SplitMix64. Every random draw in the project goes through this generator so
// that runs are reproducible bit-for-bit from a single seed; the std <random>
// distributions are implementation-defined and are not used.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1).
  double next_unit() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform on (lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  int next_int(int lo, int hi_inclusive) {
    return lo + static_cast<int>(next_below(static_cast<uint64_t>(hi_inclusive - lo + 1)));
  }

 private:
  uint64_t state_;
};

inline uint64_t mix_u64(uint64_t a, uint64_t b) {
  Rng r(a ^ (b * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL));
  return r.next_u64();
}

// Derives an independent stream for a named purpose, e.g.
// substream(seed, "pretrain.scene").
inline uint64_t substream(uint64_t seed, std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_u64(seed, h);
}

}  // namespace txc

#endif  // TAXOCODEC_RNG_HPP_
